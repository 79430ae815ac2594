use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, procrustes::assign_by_margin, repair_empty_classes};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// How the first partition of a rounding run is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitStrategy {
    /// Furthest-first seeds by cosine, a deterministic stand-in for the
    /// orthogonal initialization of Ng, Jordan and Weiss.
    Orthogonal,
    /// Rotation fixed to the identity: assign from the unrotated rows.
    Identity,
    /// Uniform random labels, empty classes repaired.
    Random,
}

impl InitStrategy {
    pub fn is_deterministic(self) -> bool {
        !matches!(self, InitStrategy::Random)
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb)
}

/// Argmax assignment for `c`-column inputs; all-zero rows go to the last class.
pub(crate) fn assign_by_argmax(z: &DMatrix<f64>) -> Partition {
    let c = z.ncols();
    let labels = z
        .row_iter()
        .map(|r| {
            if r.iter().all(|&v| v == 0.0) {
                c - 1
            } else {
                argmax(r.iter().copied())
            }
        })
        .collect();
    Partition::new(labels, c).expect("argmax is in range")
}

/// Initial partition for a `n × (c−1)` margin embedding or an `n × c`
/// Yu–Shi matrix.
///
/// * `Orthogonal`: seed 1 is the row of largest norm; each further seed is
///   the row whose largest `|cos|` to the chosen seeds is smallest. Every row
///   then joins the seed with the highest cosine.
/// * `Identity`: margin assignment (`c − 1` columns) or argmax (`c` columns)
///   on the rows as given.
/// * `Random`: uniform labels drawn from `rng`, empty classes filled with
///   randomly chosen points.
pub fn initialize<R: Rng + ?Sized>(
    m: &DMatrix<f64>,
    c: usize,
    strategy: InitStrategy,
    rng: &mut R,
) -> Result<Partition> {
    let n = m.nrows();
    if c < 2 || c > n {
        return Err(Error::ClassCount { c, n });
    }
    if m.ncols() + 1 != c && m.ncols() != c {
        return Err(Error::Shape(format!(
            "initialization input has {} columns for {c} classes",
            m.ncols()
        )));
    }
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    match strategy {
        InitStrategy::Identity => Ok(if m.ncols() + 1 == c {
            assign_by_margin(m)
        } else {
            assign_by_argmax(m)
        }),
        InitStrategy::Orthogonal => {
            let norms: Vec<f64> = rows
                .iter()
                .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect();
            let mut seeds = vec![argmax(norms.iter().copied())];
            let mut worst_cos: Vec<f64> = rows
                .iter()
                .zip(&norms)
                .map(|(r, &nr)| if nr == 0.0 { 1.0 } else { cosine(r, &rows[seeds[0]]).abs() })
                .collect();
            while seeds.len() < c {
                let next = (0..n)
                    .filter(|i| !seeds.contains(i))
                    .min_by(|&a, &b| worst_cos[a].total_cmp(&worst_cos[b]).then(a.cmp(&b)))
                    .expect("c <= n leaves candidates");
                seeds.push(next);
                for i in 0..n {
                    if norms[i] > 0.0 {
                        worst_cos[i] = worst_cos[i].max(cosine(&rows[i], &rows[next]).abs());
                    }
                }
            }
            let mut labels: Vec<usize> = rows
                .iter()
                .map(|r| argmax(seeds.iter().map(|&s| cosine(r, &rows[s]))))
                .collect();
            for (k, &s) in seeds.iter().enumerate() {
                labels[s] = k;
            }
            Partition::new(labels, c)
        }
        InitStrategy::Random => {
            let labels = (0..n).map(|_| rng.random_range(0..c)).collect();
            let mut p = Partition::new(labels, c)?;
            repair_empty_classes(&mut p, |_, _| rng.random::<f64>())?;
            Ok(p)
        }
    }
}

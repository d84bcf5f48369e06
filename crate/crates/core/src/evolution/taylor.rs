use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::states::norm;

/// Truncated Taylor series for `exp(-i H dt) v`.
///
/// The step is split into `ceil(||H|| |dt|)` pieces so each series has an
/// argument of norm at most one. A piece stops once two consecutive terms
/// fall below `tolerance * |tau|`.
pub(crate) fn taylor_step(
    h: &SparseHamiltonian,
    v: &[Complex64],
    dt: f64,
    tolerance: f64,
    max_terms: usize,
) -> Result<Vec<Complex64>> {
    if dt == 0.0 {
        return Ok(v.to_vec());
    }
    let pieces = (h.norm_bound() * dt.abs()).ceil().max(1.0) as usize;
    let tau = dt / pieces as f64;
    let threshold = tolerance * tau.abs();
    let minus_i_tau = Complex64::new(0.0, -tau);

    let mut sum = v.to_vec();
    let mut term = vec![Complex64::new(0.0, 0.0); v.len()];
    let mut next = vec![Complex64::new(0.0, 0.0); v.len()];
    for _ in 0..pieces {
        term.copy_from_slice(&sum);
        let mut previous_small = false;
        let mut converged = false;
        let mut last = f64::INFINITY;
        for k in 1..=max_terms {
            h.apply(&term, &mut next);
            let f = minus_i_tau / k as f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * f;
            }
            for (s, t) in sum.iter_mut().zip(&term) {
                *s += t;
            }
            last = norm(&term);
            let small = last <= threshold;
            if small && previous_small {
                converged = true;
                break;
            }
            previous_small = small;
        }
        if !converged {
            return Err(Error::Numerical {
                message: format!("Taylor series did not converge within {max_terms} terms"),
                residual: last,
                step: dt,
                dim: v.len(),
            });
        }
    }
    Ok(sum)
}

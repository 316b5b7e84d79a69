use nalgebra::{DMatrix, DVector};

use crate::error::{BanditError, Result};

/// Block embedding of a shared context for per-arm parameters:
/// `(0, .., 0, c, 0, .., 0)` in `R^{d K}` with `c` in block `arm`.
pub fn embed_shared(context: &[f64], arm: usize, arms: usize) -> Result<DVector<f64>> {
    if arm >= arms {
        return Err(BanditError::IndexOutOfRange { index: arm, len: arms });
    }
    let d = context.len();
    let mut out = DVector::zeros(d * arms);
    out.rows_mut(arm * d, d).copy_from_slice(context);
    Ok(out)
}

/// Feature vector of `arm` when each arm has its own context column.
pub fn embed_per_arm(contexts: &DMatrix<f64>, arm: usize) -> Result<DVector<f64>> {
    if arm >= contexts.ncols() {
        return Err(BanditError::IndexOutOfRange {
            index: arm,
            len: contexts.ncols(),
        });
    }
    Ok(contexts.column(arm).into_owned())
}

use alloc::vec::Vec;

#[allow(unused_imports)] // only needed without std
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::operator::{SensingOperator, Sparsifier};
use super::spgl1::{basis_pursuit, SolverOptions, SolverResult};
use crate::basis::{BasisKind, BasisMatrix};
use crate::error::{invalid, Error, Result};
use crate::interferometry::{combine_three_step, ComplexField, InterferogramSet};

/// Outcome of a compressive reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsReconstruction {
    pub field: ComplexField,
    /// Number of basis rows used.
    pub m: usize,
    pub solves: [SolverResult; 3],
}

impl CsReconstruction {
    pub fn converged(&self) -> bool {
        self.solves.iter().all(|s| s.converged)
    }

    pub fn iterations(&self) -> usize {
        self.solves.iter().map(|s| s.iterations).sum()
    }
}

/// `M = round(cr·n)`, rejecting ratios outside `(0, 1]` or that select no row.
pub fn measurement_count(cr: f64, n: usize) -> Result<usize> {
    if !(cr > 0.0 && cr <= 1.0) {
        return Err(invalid(alloc::format!("compression ratio {cr} is outside (0, 1]")));
    }
    let m = (cr * n as f64).round() as usize;
    if m == 0 {
        return Err(invalid(alloc::format!("compression ratio {cr} selects no rows of {n}")));
    }
    Ok(m)
}

/// Reconstructs the field from the first `round(cr·n)` measurements in the
/// basis's ordering: one basis-pursuit solve per phase shift, mapped back
/// through `Ψ` and combined with the three-step formula.
pub fn cs_reconstruct(
    igrams: &InterferogramSet,
    basis: &BasisMatrix,
    cr: f64,
    sigma: f64,
    opts: &SolverOptions,
    sparsifier: Sparsifier,
) -> Result<CsReconstruction> {
    if basis.kind() != BasisKind::Hadamard {
        return Err(Error::NotHadamard);
    }
    igrams.check_matches(basis)?;
    let m = measurement_count(cr, basis.n())?;
    let op = SensingOperator::new(basis, m, sparsifier)?;
    let mut solves: Vec<SolverResult> = Vec::with_capacity(3);
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(3);
    for shift in 0..3 {
        let res = basis_pursuit(&op, &igrams.values[shift][..m], sigma, opts)?;
        xs.push(op.synthesize(&res.s));
        solves.push(res);
    }
    let field = combine_three_step(&xs[0], &xs[1], &xs[2])?;
    let solves: [SolverResult; 3] = solves.try_into().map_err(|_| invalid("three solves expected"))?;
    if field.values().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(invalid("reconstruction produced non-finite values"));
    }
    Ok(CsReconstruction { field, m, solves })
}

use num_traits::Zero;
use rayon::prelude::*;

use super::CaseError;
use crate::field::GaussRat;
use crate::jet::{
    evolution_determining_solve, multi_indices, EvolutionAnsatz, GenVectorField, JetContext, JetError, PdeSystem,
};
use crate::poly::ExpPoly;

/// `u_t = u_yy` on the jet space over `(t, y)` with `y` as translation
/// variable.
pub fn heat_system(max_order: usize) -> Result<PdeSystem, CaseError> {
    let ctx = JetContext::new(&["t", "y"], &["u"], max_order, &["y"])?;
    let g = ctx.poly_var(ctx.var("u_yy")?);
    Ok(PdeSystem::evolution(&ctx, 0, 0, g)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolutionCaps {
    pub jet_degree: u32,
    pub translation_degree: u32,
    pub free_degree: u32,
}

#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub lambda: GaussRat,
    pub basis: Vec<ExpPoly>,
    pub cap_hint: Option<String>,
    /// Every basis element has zero residual on solutions.
    pub verified: bool,
    pub max_translation_degree: u32,
    /// Some basis element has a nonzero constant derivative with respect
    /// to a top-order jet coordinate.
    pub leading_constant: bool,
}

#[derive(Debug, Clone)]
pub struct EvolutionReport {
    pub q: usize,
    pub runs: Vec<EvolutionRun>,
    pub zero_lambda_dim: usize,
    pub nonzero_lambda_solutions: usize,
    pub leading_constant_at_nonzero_lambda: bool,
    /// Translation-variable degree of the weight-zero solutions is at most
    /// `v - 1`, `v` the weight-zero dimension.
    pub translation_degree_within_bound: bool,
}

/// Sampled exponential weights besides zero.
pub fn lambda_samples() -> Vec<GaussRat> {
    vec![
        GaussRat::from_int(1),
        GaussRat::from_int(-1),
        GaussRat::i(),
        -GaussRat::i(),
        GaussRat::from_parts((1, 1), (1, 1)),
        GaussRat::from_frac(1, 2),
    ]
}

fn top_jets(sys: &PdeSystem, axis: usize, q: usize) -> Vec<crate::poly::VarId> {
    let ctx = sys.ctx();
    multi_indices(ctx.m(), q)
        .into_iter()
        .filter(|j| j[axis] == 0)
        .filter_map(|j| ctx.u(0, &j).ok())
        .collect()
}

/// Evolutionary symmetries of `u_t = G` of order `q` for each weight.
pub fn evolution_case(
    sys: &PdeSystem,
    q: usize,
    caps: EvolutionCaps,
    lambdas: &[GaussRat],
) -> Result<EvolutionReport, CaseError> {
    let ctx = sys.ctx();
    let (_, axis, _) = sys
        .as_evolution()
        .ok_or_else(|| JetError::Unsupported("expected a solved evolution equation".into()))?;
    if ctx.vars().weight_len() != 1 {
        return Err(JetError::Unsupported("expected exactly one translation variable".into()).into());
    }
    let z = ctx.vars().translations()[0];
    let tops = top_jets(sys, axis, q);
    let runs = lambdas
        .par_iter()
        .map(|lambda| {
            let ansatz = EvolutionAnsatz {
                order: q,
                jet_degree: caps.jet_degree,
                translation_degree: caps.translation_degree,
                free_degree: caps.free_degree,
                lambda: vec![lambda.clone()],
            };
            let sol = evolution_determining_solve(sys, &ansatz)?;
            let mut verified = true;
            for eta in &sol.basis {
                let field = GenVectorField::evolutionary(ctx, vec![eta.clone()])?;
                verified &= sys.is_symmetry(&field)?;
            }
            let leading_constant = sol.basis.iter().any(|eta| {
                tops.iter().any(|&v| {
                    eta.partial(v)
                        .constant_value()
                        .is_some_and(|c| !c.is_zero())
                })
            });
            Ok(EvolutionRun {
                lambda: lambda.clone(),
                max_translation_degree: sol
                    .basis
                    .iter()
                    .map(|e| e.degree_in(z).unwrap_or(0))
                    .max()
                    .unwrap_or(0),
                basis: sol.basis,
                cap_hint: sol.cap_hint,
                verified,
                leading_constant,
            })
        })
        .collect::<Result<Vec<_>, CaseError>>()?;
    let zero: Vec<&EvolutionRun> = runs.iter().filter(|r| r.lambda.is_zero()).collect();
    let zero_lambda_dim = zero.iter().map(|r| r.basis.len()).max().unwrap_or(0);
    let nonzero: Vec<&EvolutionRun> = runs.iter().filter(|r| !r.lambda.is_zero()).collect();
    Ok(EvolutionReport {
        q,
        zero_lambda_dim,
        nonzero_lambda_solutions: nonzero.iter().map(|r| r.basis.len()).sum(),
        leading_constant_at_nonzero_lambda: nonzero.iter().any(|r| r.leading_constant),
        translation_degree_within_bound: zero
            .iter()
            .all(|r| (r.max_translation_degree as usize) < zero_lambda_dim.max(1)),
        runs,
    })
}

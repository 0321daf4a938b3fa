use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::CaseError;
use crate::field::GaussRat;
use crate::linalg::ExactMatrix;
use crate::linop::{from_h_form, operator_determining_solve, to_h_form, LinDiffOp, OperatorAnsatz, OperatorPde};
use crate::poly::{ExpPoly, Monomial, MultiPoly, VarContext, VarId};
use crate::structure::{rank_of, Element, SpaceKind, SymmetrySpace};

pub const T: VarId = VarId(0);
pub const X: VarId = VarId(1);

/// `(q+1)(q+2)/2`.
pub fn dimension_formula(q: usize) -> usize {
    (q + 1) * (q + 2) / 2
}

/// Variables `t, x`, both carrying exponential weights.
pub fn schrodinger_context() -> Arc<VarContext> {
    VarContext::independents(&["t", "x"], &["t", "x"]).expect("fixed context")
}

/// `L = i d_t + d_x^2`.
pub fn schrodinger_pde(ctx: &Arc<VarContext>) -> OperatorPde {
    let l = LinDiffOp::partial_op(ctx, T)
        .scale(&GaussRat::i())
        .add(&LinDiffOp::derivative(ctx, vec![0, 2]));
    OperatorPde::new(l, T).expect("valid operator")
}

/// Symmetry operators of order `q` with weights `(lambda, mu)` from the
/// operator ansatz, degree caps `v^(q) - 1`.
pub fn ansatz_basis(ctx: &Arc<VarContext>, q: usize, lambda: &GaussRat, mu: &GaussRat) -> Result<Vec<LinDiffOp>, CaseError> {
    let pde = schrodinger_pde(ctx);
    let ansatz = OperatorAnsatz::from_bound(ctx, q, dimension_formula(q), vec![lambda.clone(), mu.clone()]);
    Ok(operator_determining_solve(&pde, &ansatz)?.basis)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerReport {
    pub q: usize,
    pub dimension: usize,
    pub basis: Vec<LinDiffOp>,
    /// `h_0, ..., h_q` per basis element.
    pub h_table: Vec<Vec<ExpPoly>>,
    /// `(deg_t, deg_x)` of each `h_j`, per basis element.
    pub bidegrees: Vec<Vec<(u32, u32)>>,
    /// `deg_t h_j <= j` and `deg_x h_j <= q - j` everywhere.
    pub bidegree_ok: bool,
}

fn bidegree(h: &ExpPoly) -> (u32, u32) {
    (h.degree_in(T).unwrap_or(0), h.degree_in(X).unwrap_or(0))
}

fn report(q: usize, basis: Vec<LinDiffOp>, h_table: Vec<Vec<ExpPoly>>) -> SchrodingerReport {
    let bidegrees: Vec<Vec<(u32, u32)>> = h_table
        .iter()
        .map(|hs| hs.iter().map(bidegree).collect())
        .collect();
    let bidegree_ok = bidegrees.iter().all(|row| {
        row.iter()
            .enumerate()
            .all(|(j, &(dt, dx))| dt as usize <= j && dx as usize <= q - j)
    });
    SchrodingerReport {
        q,
        dimension: basis.len(),
        basis,
        h_table,
        bidegrees,
        bidegree_ok,
    }
}

/// h-form table of operators of order `<= q`, padded to `q + 1` entries.
pub fn h_table(ctx: &Arc<VarContext>, q: usize, basis: &[LinDiffOp]) -> Result<Vec<Vec<ExpPoly>>, CaseError> {
    basis
        .iter()
        .map(|r| {
            let mut hs = to_h_form(r, X)?;
            hs.resize(q + 1, ExpPoly::zero(ctx));
            Ok(hs)
        })
        .collect()
}

/// The ansatz route as a report.
pub fn solve_ansatz(q: usize) -> Result<SchrodingerReport, CaseError> {
    let ctx = schrodinger_context();
    let basis = ansatz_basis(&ctx, q, &GaussRat::zero(), &GaussRat::zero())?;
    let table = h_table(&ctx, q, &basis)?;
    Ok(report(q, basis, table))
}

/// A polynomial depending linearly on parameters: `sum_p c_p * parts[p]`.
#[derive(Clone)]
struct Parametric {
    parts: Vec<MultiPoly>,
}

impl Parametric {
    fn zero(n: usize) -> Self {
        Parametric {
            parts: vec![MultiPoly::zero(); n],
        }
    }

    fn grow(&mut self, n: usize) {
        self.parts.resize(n, MultiPoly::zero());
    }

    fn map(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> Self {
        Parametric {
            parts: self.parts.iter().map(f).collect(),
        }
    }
}

/// `int_0^x p dx`.
fn integrate_x(p: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::zero();
    for (m, c) in p.terms() {
        let e = m.exponent(X);
        let f = GaussRat::from_frac(1, e as i64 + 1);
        out.add_term(m.with_exponent(X, e + 1), c * &f);
    }
    out
}

/// Solves `h'_q = 0`, `dh_j/dt = -h'_{j-1}` (j = 1..q) and `dh_0/dt = 0`
/// over polynomials: `h_q = f_q(t)`, then `h_{j-1} = -int dh_j/dt dx + g_{j-1}(t)`
/// downward, with the free functions of `t` expanded up to degree
/// `v^(q) - 1` and the remaining condition imposed exactly.
pub fn solve_recurrence(q: usize) -> Result<SchrodingerReport, CaseError> {
    let ctx = schrodinger_context();
    let cap = dimension_formula(q) - 1;
    // parameters: (j, k) for the t^k coefficient of the free function of h_j,
    // enumerated with j descending from q, k ascending
    let mut n_params = 0;
    let mut hs: Vec<Parametric> = vec![Parametric::zero(0); q + 1];
    let free = |n_params: &mut usize, h: &mut Parametric| {
        for k in 0..=cap {
            h.grow(*n_params + 1);
            h.parts[*n_params] = MultiPoly::term(Monomial::var_pow(T, k as u32), GaussRat::one());
            *n_params += 1;
        }
    };
    let mut top = Parametric::zero(0);
    free(&mut n_params, &mut top);
    hs[q] = top;
    for j in (1..=q).rev() {
        let mut lower = hs[j].map(|p| integrate_x(&p.partial(T)).neg());
        free(&mut n_params, &mut lower);
        hs[j - 1] = lower;
    }
    for h in hs.iter_mut() {
        h.grow(n_params);
    }
    // dh_0/dt = 0: one equation per monomial
    let dh0 = hs[0].map(|p| p.partial(T));
    let mut rows: std::collections::BTreeMap<Monomial, Vec<GaussRat>> = Default::default();
    for (p, part) in dh0.parts.iter().enumerate() {
        for (m, c) in part.terms() {
            rows.entry(m.clone())
                .or_insert_with(|| vec![GaussRat::zero(); n_params])[p] = c.clone();
        }
    }
    let system = if rows.is_empty() {
        ExactMatrix::zeros(0, n_params)
    } else {
        ExactMatrix::from_rows(rows.into_values().collect())
    };
    let null = system.nullspace();
    let mut basis = Vec::new();
    let mut table = Vec::new();
    for v in null {
        let h: Vec<ExpPoly> = hs
            .iter()
            .map(|hp| {
                let mut acc = MultiPoly::zero();
                for (c, part) in v.iter().zip(&hp.parts) {
                    acc.add_assign_scaled(part, c);
                }
                ExpPoly::from_poly(&ctx, acc)
            })
            .collect();
        basis.push(from_h_form(&h, X));
        table.push(h);
    }
    Ok(report(q, basis, table))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub q: usize,
    pub recurrence_dim: usize,
    pub ansatz_dim: usize,
    pub stacked_rank: usize,
    pub spans_agree: bool,
    pub bidegree_ok: bool,
}

/// Compares the recurrence route with the operator ansatz at weight zero.
pub fn cross_validate(q: usize) -> Result<CrossValidation, CaseError> {
    let rec = solve_recurrence(q)?;
    let ans = solve_ansatz(q)?;
    let a: Vec<Element> = rec.basis.iter().cloned().map(Element::Operator).collect();
    let b: Vec<Element> = ans.basis.iter().cloned().map(Element::Operator).collect();
    let stacked: Vec<&Element> = a.iter().chain(&b).collect();
    let stacked_rank = rank_of(&stacked);
    let agree = rank_of(&a.iter().collect::<Vec<_>>()) == a.len()
        && rank_of(&b.iter().collect::<Vec<_>>()) == b.len()
        && a.len() == b.len()
        && stacked_rank == a.len();
    if !agree {
        let base: Vec<&Element> = b.iter().collect();
        let witness = a
            .iter()
            .chain(&b)
            .find(|e| {
                let mut t = base.clone();
                t.push(e);
                rank_of(&t) > rank_of(&base)
            })
            .map(|e| e.to_string())
            .unwrap_or_else(|| "dimension mismatch".into());
        return Err(CaseError::SpanMismatch { q, witness });
    }
    Ok(CrossValidation {
        q,
        recurrence_dim: rec.dimension,
        ansatz_dim: ans.dimension,
        stacked_rank,
        spans_agree: agree,
        bidegree_ok: rec.bidegree_ok && ans.bidegree_ok,
    })
}

/// Fixed sample of nonzero `(lambda, mu)` weights.
pub fn lambda_mu_grid() -> Vec<(GaussRat, GaussRat)> {
    let g = |a: (i64, i64), b: (i64, i64)| {
        (
            GaussRat::from_parts((a.0, 1), (a.1, 1)),
            GaussRat::from_parts((b.0, 1), (b.1, 1)),
        )
    };
    vec![
        g((1, 0), (0, 0)),
        g((-1, 0), (0, 0)),
        g((0, 0), (1, 0)),
        g((0, 0), (-1, 0)),
        g((0, 1), (0, 0)),
        g((0, -1), (0, 1)),
        g((0, 0), (0, -1)),
        g((1, 1), (1, 1)),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub lambda: GaussRat,
    pub mu: GaussRat,
    pub q: usize,
    pub dimension: usize,
}

/// Solves the operator ansatz at every grid point; results keep grid order.
pub fn exponential_scan(q: usize, grid: &[(GaussRat, GaussRat)]) -> Result<Vec<ScanPoint>, CaseError> {
    let ctx = schrodinger_context();
    grid.par_iter()
        .map(|(l, m)| {
            Ok(ScanPoint {
                lambda: l.clone(),
                mu: m.clone(),
                q,
                dimension: ansatz_basis(&ctx, q, l, m)?.len(),
            })
        })
        .collect()
}

/// Filtered symmetry space `V^(0) ⊆ ... ⊆ V^(qmax)` with translations `t, x`.
pub fn schrodinger_space(qmax: usize) -> Result<SymmetrySpace, CaseError> {
    let ctx = schrodinger_context();
    let levels = (0..=qmax)
        .map(|q| {
            let basis = ansatz_basis(&ctx, q, &GaussRat::zero(), &GaussRat::zero())?;
            Ok((q, basis.into_iter().map(Element::Operator).collect()))
        })
        .collect::<Result<Vec<_>, CaseError>>()?;
    Ok(SymmetrySpace::from_levels(
        SpaceKind::Operator,
        &ctx,
        levels,
        vec![T, X],
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_small_orders() {
        assert_eq!(solve_recurrence(0).unwrap().dimension, 1);
        let r1 = solve_recurrence(1).unwrap();
        assert_eq!(r1.dimension, 3);
        assert!(r1.bidegree_ok);
        let pde = schrodinger_pde(&schrodinger_context());
        for r in &r1.basis {
            assert!(pde.is_symmetry(r).unwrap(), "{r}");
        }
    }

    #[test]
    fn routes_agree_at_low_order() {
        for q in 0..=2 {
            let cv = cross_validate(q).unwrap();
            assert_eq!(cv.ansatz_dim, dimension_formula(q));
            assert!(cv.spans_agree && cv.bidegree_ok);
        }
    }

    #[test]
    fn first_order_adjoint_matrices() {
        let space = schrodinger_space(1).unwrap();
        let gt = space.adjoint_matrix(T).unwrap();
        let gx = space.adjoint_matrix(X).unwrap();
        assert!(gt.commutes_with(&gx));
        let x3 = crate::linalg::UniPoly::monomial(GaussRat::one(), 3);
        assert_eq!(crate::linalg::char_poly(&gt).unwrap(), x3);
        assert_eq!(crate::linalg::char_poly(&gx).unwrap(), x3);
    }
}

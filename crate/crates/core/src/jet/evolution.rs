use std::collections::BTreeMap;

use rayon::prelude::*;

use super::context::{multi_indices, JetContext};
use super::system::PdeSystem;
use super::vector_field::GenVectorField;
use super::JetError;
use crate::field::GaussRat;
use crate::linalg::{SparseEliminator, SparseRow};
use crate::poly::{ExpPoly, Monomial, MultiPoly, VarId, Weight};

/// Caps for the evolutionary ansatz
/// `eta = exp(lambda . z) * sum c * (x-monomial) * (jet monomial)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionAnsatz {
    /// Highest jet order `q` of the characteristic.
    pub order: usize,
    /// Total degree cap in the jet coordinates `u, u_y, ...`.
    pub jet_degree: u32,
    /// Degree cap in each translation variable.
    pub translation_degree: u32,
    /// Degree cap in each remaining independent variable (e.g. time).
    pub free_degree: u32,
    /// Exponential weight per translation variable.
    pub lambda: Vec<GaussRat>,
}

#[derive(Debug, Clone)]
pub struct EvolutionSolution {
    /// Characteristics spanning the solution space.
    pub basis: Vec<ExpPoly>,
    pub unknowns: usize,
    pub rank: usize,
    /// Set when the equation's own flow `eta = G` does not fit the caps.
    pub cap_hint: Option<String>,
}

/// Ansatz functions in a fixed order: x-monomials outer, jet monomials inner,
/// both ascending graded-lex.
pub fn ansatz_terms(
    ctx: &JetContext,
    alpha: usize,
    evolution_axis: usize,
    ansatz: &EvolutionAnsatz,
) -> Result<Vec<ExpPoly>, JetError> {
    let vars = ctx.vars();
    if ansatz.lambda.len() != vars.weight_len() {
        return Err(JetError::InvalidContext(format!(
            "expected {} exponential weights, got {}",
            vars.weight_len(),
            ansatz.lambda.len()
        )));
    }
    let mut jets = Vec::new();
    for order in 0..=ansatz.order {
        for multi in multi_indices(ctx.m(), order) {
            if multi[evolution_axis] == 0 {
                jets.push(ctx.u(alpha, &multi)?);
            }
        }
    }
    let jet_monos = monomials_total(&jets, ansatz.jet_degree);
    let mut x_monos = vec![Monomial::one()];
    for l in 0..ctx.m() {
        let x = ctx.x(l);
        let cap = if vars.translation_slot(x).is_some() {
            ansatz.translation_degree
        } else {
            ansatz.free_degree
        };
        x_monos = x_monos
            .iter()
            .flat_map(|m| (0..=cap).map(move |e| m.mul(&Monomial::var_pow(x, e))))
            .collect();
    }
    x_monos.sort();
    let w = Weight(ansatz.lambda.clone());
    let mut out = Vec::with_capacity(x_monos.len() * jet_monos.len());
    for xm in &x_monos {
        for jm in &jet_monos {
            let p = MultiPoly::term(xm.mul(jm), GaussRat::from_int(1));
            out.push(ExpPoly::with_weight(vars, w.clone(), p));
        }
    }
    Ok(out)
}

/// All monomials in `vars` of total degree `<= cap`, ascending graded-lex.
fn monomials_total(vars: &[VarId], cap: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![Monomial::one()];
    for _ in 0..cap {
        let mut next = Vec::new();
        for m in &frontier {
            // extend only with variables >= the last one used, to avoid repeats
            let last = m.pairs().last().map(|&(v, _)| v);
            for &v in vars {
                if last.is_some_and(|l| v < l) {
                    continue;
                }
                next.push(m.mul(&Monomial::var(v)));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out.dedup();
    out
}

/// Solves the determining system of evolutionary symmetries of an evolution
/// equation `u_t = G` within the given caps.
pub fn evolution_determining_solve(
    sys: &PdeSystem,
    ansatz: &EvolutionAnsatz,
) -> Result<EvolutionSolution, JetError> {
    let ctx = sys.ctx();
    let (alpha, axis, g) = sys.as_evolution().ok_or_else(|| {
        JetError::Unsupported("evolutionary search needs a single solved equation u_t = G".into())
    })?;
    if ctx.n() != 1 {
        return Err(JetError::Unsupported(
            "evolutionary search supports one dependent variable".into(),
        ));
    }
    let terms = ansatz_terms(ctx, alpha, axis, ansatz)?;
    let columns: Vec<Vec<(usize, Weight, Monomial, GaussRat)>> = terms
        .par_iter()
        .map(|phi| {
            let q = GenVectorField::evolutionary(ctx, vec![phi.clone()])?;
            let residuals = sys.apply_on_solutions(&q)?;
            Ok(residuals
                .iter()
                .enumerate()
                .flat_map(|(k, r)| {
                    r.coeff_extract()
                        .into_iter()
                        .map(move |(w, m, c)| (k, w, m, c))
                })
                .collect())
        })
        .collect::<Result<_, JetError>>()?;

    let mut rows: BTreeMap<(usize, Weight, Monomial), SparseRow> = BTreeMap::new();
    for (j, col) in columns.into_iter().enumerate() {
        for (k, w, m, c) in col {
            rows.entry((k, w, m)).or_default().insert(j, c);
        }
    }
    let mut elim = SparseEliminator::new(terms.len());
    for (_, row) in rows {
        elim.push(row);
    }
    let basis = elim
        .nullspace()
        .into_iter()
        .map(|vec| {
            let mut eta = ExpPoly::zero(ctx.vars());
            for (&j, c) in &vec {
                eta.add_scaled(&terms[j], c);
            }
            eta
        })
        .collect();
    Ok(EvolutionSolution {
        basis,
        unknowns: terms.len(),
        rank: elim.rank(),
        cap_hint: cap_hint(ctx, alpha, axis, g, ansatz),
    })
}

fn cap_hint(
    ctx: &JetContext,
    alpha: usize,
    axis: usize,
    g: &ExpPoly,
    ansatz: &EvolutionAnsatz,
) -> Option<String> {
    let order = ctx.order_of_poly(g);
    if order > ansatz.order {
        return Some(format!(
            "the equation's own flow has order {order} > q = {}",
            ansatz.order
        ));
    }
    for (w, p) in g.parts() {
        if !w.is_zero() {
            return Some("the equation's right-hand side carries an exponential factor".into());
        }
        for (m, _) in p.terms() {
            let mut jet_deg = 0;
            for &(v, e) in m.pairs() {
                match ctx.jet_of(v) {
                    Some((beta, multi)) => {
                        if beta != alpha || multi[axis] > 0 {
                            return Some(format!("unexpected variable {}", ctx.vars().name(v)));
                        }
                        jet_deg += e;
                    }
                    None => {
                        let cap = if ctx.vars().translation_slot(v).is_some() {
                            ansatz.translation_degree
                        } else {
                            ansatz.free_degree
                        };
                        if e > cap {
                            return Some(format!(
                                "degree {e} in {} exceeds cap {cap}",
                                ctx.vars().name(v)
                            ));
                        }
                    }
                }
            }
            if jet_deg > ansatz.jet_degree {
                return Some(format!(
                    "jet degree {jet_deg} of the equation exceeds cap {}",
                    ansatz.jet_degree
                ));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use std::sync::Arc;

    fn heat() -> (Arc<JetContext>, PdeSystem) {
        let ctx = JetContext::new(&["t", "y"], &["u"], 5, &["y"]).unwrap();
        let g = ctx.poly_var(ctx.var("u_yy").unwrap());
        let sys = PdeSystem::evolution(&ctx, 0, 0, g).unwrap();
        (ctx, sys)
    }

    #[test]
    fn monomial_enumeration() {
        let m = monomials_total(&[VarId(0), VarId(1)], 2);
        assert_eq!(m.len(), 6);
        assert!(m.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn heat_first_order_linear() {
        let (c, sys) = heat();
        let ansatz = EvolutionAnsatz {
            order: 1,
            jet_degree: 1,
            translation_degree: 2,
            free_degree: 1,
            lambda: vec![GaussRat::zero()],
        };
        let sol = evolution_determining_solve(&sys, &ansatz).unwrap();
        for eta in &sol.basis {
            let q = GenVectorField::evolutionary(&c, vec![eta.clone()]).unwrap();
            assert!(sys.is_symmetry(&q).unwrap(), "{eta}");
        }
        // u, u_y, t*u_y*2 + y*u, and constants are all symmetries of a linear equation
        let names: Vec<String> = sol.basis.iter().map(|e| e.to_string()).collect();
        assert!(sol.basis.len() >= 3, "{names:?}");
        assert!(sol.cap_hint.is_some(), "u_yy is outside q = 1");
    }
}

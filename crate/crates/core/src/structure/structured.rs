use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::element::{express_in, rank_of, Element};
use super::space::SymmetrySpace;
use super::StructureError;
use crate::field::GaussRat;
use crate::linalg::{block_exp, common_decompose, BlockDecomposition, ExactMatrix, ExpPolyMatrix};
use crate::poly::{ExpPoly, Monomial, MultiPoly, VarId, Weight};

/// A basis element written as `exp(sum lambda_s z_s) * sum_j z^j C_j` with
/// every `C_j` free of the translation variables.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredElement {
    pub element: Element,
    /// `z`-exponent vector (one entry per translation variable) and its
    /// coefficient object.
    pub parts: Vec<(Vec<u32>, Element)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuredBlock {
    /// Eigenvalue `lambda_gamma` per translation variable.
    pub eigenvalues: Vec<GaussRat>,
    /// Nilpotency index `k_gamma` per translation variable.
    pub nilpotency: Vec<usize>,
    /// Adjoint matrices restricted to the block, in the block's basis.
    pub matrices: Vec<ExactMatrix>,
    pub elements: Vec<StructuredElement>,
}

impl StructuredBlock {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuredBasis {
    pub translations: Vec<VarId>,
    pub blocks: Vec<StructuredBlock>,
}

/// Outcome of the structural checks on a structured basis.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verification {
    pub commuting: bool,
    pub degree_bound: bool,
    pub span_preserved: bool,
    pub differentiation_consistent: bool,
    pub block_exp_derivative: bool,
    pub reconstruction: bool,
    pub round_trip: bool,
}

impl Verification {
    pub fn all_ok(&self) -> bool {
        self.commuting
            && self.degree_bound
            && self.span_preserved
            && self.differentiation_consistent
            && self.block_exp_derivative
            && self.reconstruction
            && self.round_trip
    }
}

/// Bookkeeping numbers of a (sub)space: `v`, the block count `rho`, block
/// dimensions `r_gamma`, nilpotency indices and eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub q: Option<usize>,
    pub v: usize,
    pub rho: usize,
    pub block_dims: Vec<usize>,
    pub nilpotency: Vec<Vec<usize>>,
    pub eigenvalues: Vec<Vec<GaussRat>>,
    /// `rho <= v`, `sum r = v` and `1 <= k <= r` all hold.
    pub inequalities_hold: bool,
}

fn decompose(space: &SymmetrySpace) -> Result<(Vec<ExactMatrix>, BlockDecomposition), StructureError> {
    let gs = space.adjoint_matrices()?;
    let n = space.dim();
    if n == 0 {
        return Ok((
            gs,
            BlockDecomposition {
                ambient_dim: 0,
                blocks: Vec::new(),
                unresolved: Vec::new(),
            },
        ));
    }
    if gs.is_empty() {
        let block = crate::linalg::Block {
            basis: ExactMatrix::identity(n),
            eigenvalues: Vec::new(),
            nilpotency: Vec::new(),
            restricted: Vec::new(),
        };
        return Ok((
            gs,
            BlockDecomposition {
                ambient_dim: n,
                blocks: vec![block],
                unresolved: Vec::new(),
            },
        ));
    }
    let dec = common_decompose(&gs)?;
    if let Some(u) = dec.unresolved.first() {
        return Err(StructureError::Unresolved {
            factor: u.factor.to_string(),
        });
    }
    Ok((gs, dec))
}

pub fn ansatz_dimensions(space: &SymmetrySpace, q: Option<usize>) -> Result<DimensionReport, StructureError> {
    let sub = match q {
        Some(q) => space.level(q)?,
        None => space.clone(),
    };
    let (_, dec) = decompose(&sub)?;
    let v = sub.dim();
    let block_dims = dec.block_dims();
    let rho = block_dims.len();
    let nilpotency: Vec<Vec<usize>> = dec.blocks.iter().map(|b| b.nilpotency.clone()).collect();
    let ok = rho <= v
        && block_dims.iter().sum::<usize>() == v
        && dec
            .blocks
            .iter()
            .all(|b| b.nilpotency.iter().all(|&k| 1 <= k && k <= b.dim()));
    Ok(DimensionReport {
        q,
        v,
        rho,
        block_dims,
        nilpotency,
        eigenvalues: dec.blocks.iter().map(|b| b.eigenvalues.clone()).collect(),
        inequalities_hold: ok,
    })
}

/// Splits an element into `z`-exponent parts after removing the block's
/// exponential factor.
fn split_parts(
    space: &SymmetrySpace,
    e: &Element,
    lambda: &[GaussRat],
) -> Result<Vec<(Vec<u32>, Element)>, StructureError> {
    let ctx = space.ctx();
    let zs = space.translations();
    let slots: Vec<usize> = zs.iter().map(|&z| ctx.translation_slot(z).unwrap()).collect();
    let mut groups: BTreeMap<Vec<u32>, Vec<(super::ElementKey, GaussRat)>> = BTreeMap::new();
    for ((tag, w, m), c) in e.coords() {
        let mut w = w.clone();
        for (s, &slot) in slots.iter().enumerate() {
            if w.0[slot] != lambda[s] {
                return Err(StructureError::NotPrimary);
            }
            w.0[slot] = GaussRat::zero();
        }
        let exps: Vec<u32> = zs.iter().map(|&z| m.exponent(z)).collect();
        let stripped = zs.iter().fold(m.clone(), |acc, &z| acc.without(z));
        groups.entry(exps).or_default().push(((tag, w, stripped), c));
    }
    Ok(groups
        .into_iter()
        .map(|(exps, coords)| (exps, rebuild(e, coords)))
        .collect())
}

fn rebuild(like: &Element, coords: Vec<(super::ElementKey, GaussRat)>) -> Element {
    match like {
        Element::Operator(r) => Element::Operator(crate::linop::LinDiffOp::from_coords(r.ctx(), coords)),
        Element::Characteristic(eta) => {
            let ctx = eta[0].ctx();
            let mut out: Vec<ExpPoly> = eta.iter().map(|_| ExpPoly::zero(ctx)).collect();
            for ((tag, w, m), c) in coords {
                out[tag[0] as usize].add_term(w, m, c);
            }
            Element::Characteristic(out)
        }
    }
}

/// `exp(lambda . z) * sum z^j C_j`.
pub fn expand(space: &SymmetrySpace, lambda: &[GaussRat], parts: &[(Vec<u32>, Element)]) -> Option<Element> {
    let ctx = space.ctx();
    let mut w = Weight::zero(ctx.weight_len());
    for (s, &z) in space.translations().iter().enumerate() {
        w.0[ctx.translation_slot(z).unwrap()] = lambda[s].clone();
    }
    let mut out: Option<Element> = None;
    for (exps, c) in parts {
        let mono = Monomial::from_pairs(space.translations().iter().copied().zip(exps.iter().copied()));
        let f = ExpPoly::with_weight(ctx, w.clone(), MultiPoly::term(mono, GaussRat::one()));
        let piece = c.mul_function(&f);
        out = Some(match out {
            Some(acc) => acc.add(&piece),
            None => piece,
        });
    }
    out
}

pub fn structured_basis(space: &SymmetrySpace) -> Result<StructuredBasis, StructureError> {
    let (_, dec) = decompose(space)?;
    let mut blocks = Vec::new();
    for b in &dec.blocks {
        let elements = b
            .basis
            .columns()
            .iter()
            .map(|col| {
                let element = Element::linear_combination(space.basis(), col);
                let parts = split_parts(space, &element, &b.eigenvalues_or_zero(space))?;
                Ok(StructuredElement { element, parts })
            })
            .collect::<Result<Vec<_>, StructureError>>()?;
        blocks.push(StructuredBlock {
            eigenvalues: b.eigenvalues.clone(),
            nilpotency: b.nilpotency.clone(),
            matrices: b.restricted.clone(),
            elements,
        });
    }
    Ok(StructuredBasis {
        translations: space.translations().to_vec(),
        blocks,
    })
}

trait EigenOrZero {
    fn eigenvalues_or_zero(&self, space: &SymmetrySpace) -> Vec<GaussRat>;
}

impl EigenOrZero for crate::linalg::Block {
    fn eigenvalues_or_zero(&self, space: &SymmetrySpace) -> Vec<GaussRat> {
        if self.eigenvalues.is_empty() {
            vec![GaussRat::zero(); space.translations().len()]
        } else {
            self.eigenvalues.clone()
        }
    }
}

impl StructuredBasis {
    pub fn elements(&self) -> impl Iterator<Item = &StructuredElement> {
        self.blocks.iter().flat_map(|b| &b.elements)
    }

    /// Runs every structural check against the original space.
    pub fn verify(&self, space: &SymmetrySpace) -> Verification {
        let zs = space.translations();
        let ctx = space.ctx();
        let mut v = Verification {
            commuting: space.adjoint_matrices().is_ok(),
            ..Verification::default()
        };

        v.degree_bound = self.blocks.iter().all(|b| {
            b.elements.iter().all(|e| {
                zs.iter()
                    .zip(&b.nilpotency)
                    .all(|(&z, &k)| (e.element.degree_in(z) as usize) < k)
            })
        });

        let original: Vec<&Element> = space.basis().iter().collect();
        let structured: Vec<&Element> = self.elements().map(|e| &e.element).collect();
        let both: Vec<&Element> = original.iter().chain(&structured).copied().collect();
        let r = rank_of(&original);
        v.span_preserved = r == space.dim() && rank_of(&structured) == r && rank_of(&both) == r;

        v.differentiation_consistent = self.blocks.iter().all(|b| {
            let elems: Vec<Element> = b.elements.iter().map(|e| e.element.clone()).collect();
            zs.iter().zip(&b.matrices).all(|(&z, g)| {
                let images: Vec<Element> = elems.iter().map(|e| e.partial(z)).collect();
                match express_in(&elems, &images) {
                    Ok(cols) => ExactMatrix::from_columns(elems.len(), &cols) == *g,
                    Err(_) => false,
                }
            })
        });

        let exps: Vec<Vec<ExpPolyMatrix>> = self
            .blocks
            .iter()
            .map(|b| {
                zs.iter()
                    .enumerate()
                    .filter_map(|(s, &z)| block_exp(&b.matrices[s], &b.eigenvalues[s], b.nilpotency[s], z, ctx).ok())
                    .collect()
            })
            .collect();
        v.block_exp_derivative = self.blocks.iter().zip(&exps).all(|(b, es)| {
            es.len() == zs.len()
                && es
                    .iter()
                    .enumerate()
                    .all(|(s, e)| e.partial(zs[s]) == e.left_mul(&b.matrices[s]))
        });

        v.reconstruction = v.block_exp_derivative
            && self.blocks.iter().zip(&exps).all(|(b, es)| {
                if b.elements.is_empty() {
                    return true;
                }
                let Some(total) = es.iter().cloned().reduce(|a, c| a.mul(&c)) else {
                    return true;
                };
                let at_zero: Vec<Element> = b
                    .elements
                    .iter()
                    .map(|e| zs.iter().fold(e.element.clone(), |acc, &z| acc.set_zero(z)))
                    .collect();
                b.elements.iter().enumerate().all(|(l, e)| {
                    let mut sum = e.element.zero_like();
                    for (m, q0) in at_zero.iter().enumerate() {
                        sum = sum.add(&q0.mul_function(&total.entries[m][l]));
                    }
                    sum == e.element
                })
            });

        v.round_trip = self.blocks.iter().all(|b| {
            b.elements.iter().all(|e| {
                let lambda = if b.eigenvalues.is_empty() {
                    vec![GaussRat::zero(); zs.len()]
                } else {
                    b.eigenvalues.clone()
                };
                let ok_parts = e
                    .parts
                    .iter()
                    .all(|(_, c)| zs.iter().all(|&z| c.degree_in(z) == 0 && c.partial(z).is_zero()));
                ok_parts
                    && match expand(space, &lambda, &e.parts) {
                        Some(x) => x == e.element,
                        None => e.element.is_zero(),
                    }
            })
        });
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::LinDiffOp;
    use crate::poly::VarContext;
    use crate::structure::SpaceKind;

    #[test]
    fn exponential_eigenvector() {
        let ctx = VarContext::independents(&["t", "x"], &["t"]).unwrap();
        let f = ExpPoly::exp(&ctx, Weight(vec![GaussRat::from_int(2)]));
        let r = LinDiffOp::term(f, vec![0, 1]);
        let space = SymmetrySpace::new(SpaceKind::Operator, &ctx, vec![Element::Operator(r)], vec![VarId(0)]).unwrap();
        let sb = structured_basis(&space).unwrap();
        assert_eq!(sb.blocks.len(), 1);
        assert_eq!(sb.blocks[0].eigenvalues, vec![GaussRat::from_int(2)]);
        assert_eq!(sb.blocks[0].nilpotency, vec![1]);
        assert!(sb.verify(&space).all_ok());
    }

    #[test]
    fn translation_free_space_is_trivial() {
        let ctx = VarContext::independents(&["t", "x"], &["t", "x"]).unwrap();
        let basis = vec![
            Element::Operator(LinDiffOp::identity(&ctx)),
            Element::Operator(LinDiffOp::partial_op(&ctx, VarId(1))),
        ];
        let space = SymmetrySpace::new(SpaceKind::Operator, &ctx, basis, vec![VarId(0), VarId(1)]).unwrap();
        assert!(space.adjoint_matrix(VarId(0)).unwrap().is_zero());
        let sb = structured_basis(&space).unwrap();
        assert_eq!(sb.blocks.len(), 1);
        assert_eq!(sb.blocks[0].nilpotency, vec![1, 1]);
        assert!(sb.verify(&space).all_ok());
        let rep = ansatz_dimensions(&space, None).unwrap();
        assert_eq!((rep.v, rep.rho), (2, 1));
    }

    #[test]
    fn closure_violation_is_reported() {
        let ctx = VarContext::independents(&["t", "x"], &["t", "x"]).unwrap();
        let basis = vec![Element::Operator(LinDiffOp::multiplication(ExpPoly::var(&ctx, VarId(1))))];
        let space = SymmetrySpace::new(SpaceKind::Operator, &ctx, basis, vec![VarId(1)]).unwrap();
        assert!(matches!(
            space.adjoint_matrix(VarId(1)),
            Err(StructureError::ClosureViolation { element: 0, .. })
        ));
    }

    #[test]
    fn empty_space() {
        let ctx = VarContext::independents(&["t", "x"], &["t", "x"]).unwrap();
        let space = SymmetrySpace::new(SpaceKind::Operator, &ctx, vec![], vec![VarId(0)]).unwrap();
        let rep = ansatz_dimensions(&space, None).unwrap();
        assert_eq!((rep.v, rep.rho), (0, 0));
        assert!(rep.inequalities_hold);
        assert!(structured_basis(&space).unwrap().blocks.is_empty());
    }
}

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::field::GaussRat;
use crate::linalg::ExactMatrix;
use crate::linop::LinDiffOp;
use crate::poly::{ExpPoly, Monomial, VarContext, VarId, Weight};

/// Coordinate key: a component tag (derivative multi-index for operators,
/// `[alpha]` for characteristics), the exponential weight and the monomial.
pub type ElementKey = (Vec<u32>, Weight, Monomial);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Operator,
    Evolutionary,
}

/// A symmetry: a linear operator, or the characteristic tuple of an
/// evolutionary vector field.
#[derive(Clone, PartialEq)]
pub enum Element {
    Operator(LinDiffOp),
    Characteristic(Vec<ExpPoly>),
}

impl Element {
    pub fn kind(&self) -> SpaceKind {
        match self {
            Element::Operator(_) => SpaceKind::Operator,
            Element::Characteristic(_) => SpaceKind::Evolutionary,
        }
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        match self {
            Element::Operator(r) => r.ctx(),
            Element::Characteristic(eta) => eta[0].ctx(),
        }
    }

    pub fn zero_like(&self) -> Element {
        match self {
            Element::Operator(r) => Element::Operator(LinDiffOp::zero(r.ctx())),
            Element::Characteristic(eta) => {
                Element::Characteristic(eta.iter().map(|e| ExpPoly::zero(e.ctx())).collect())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Operator(r) => r.is_zero(),
            Element::Characteristic(eta) => eta.iter().all(ExpPoly::is_zero),
        }
    }

    pub fn as_operator(&self) -> Option<&LinDiffOp> {
        match self {
            Element::Operator(r) => Some(r),
            Element::Characteristic(_) => None,
        }
    }

    pub fn as_characteristic(&self) -> Option<&[ExpPoly]> {
        match self {
            Element::Operator(_) => None,
            Element::Characteristic(eta) => Some(eta),
        }
    }

    fn map(&self, f: impl FnMut(&ExpPoly) -> ExpPoly) -> Element {
        match self {
            Element::Operator(r) => Element::Operator(r.map_coeffs(f)),
            Element::Characteristic(eta) => Element::Characteristic(eta.iter().map(f).collect()),
        }
    }

    pub fn scale(&self, s: &GaussRat) -> Element {
        self.map(|c| c.scale(s))
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_function(&self, f: &ExpPoly) -> Element {
        self.map(|c| f * c)
    }

    pub fn add(&self, o: &Element) -> Element {
        match (self, o) {
            (Element::Operator(a), Element::Operator(b)) => Element::Operator(a.add(b)),
            (Element::Characteristic(a), Element::Characteristic(b)) => {
                Element::Characteristic(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => panic!("adding elements of different kinds"),
        }
    }

    /// `d/dz` of the coefficients, i.e. the adjoint action of the translation.
    pub fn partial(&self, z: VarId) -> Element {
        self.map(|c| c.partial(z))
    }

    pub fn set_zero(&self, z: VarId) -> Element {
        self.map(|c| c.set_zero(z))
    }

    /// Highest polynomial degree in `z` over all coefficients.
    pub fn degree_in(&self, z: VarId) -> u32 {
        let d = |c: &ExpPoly| c.degree_in(z).unwrap_or(0);
        match self {
            Element::Operator(r) => r.terms().map(|(_, c)| d(c)).max().unwrap_or(0),
            Element::Characteristic(eta) => eta.iter().map(d).max().unwrap_or(0),
        }
    }

    pub fn coefficients(&self) -> Vec<&ExpPoly> {
        match self {
            Element::Operator(r) => r.terms().map(|(_, c)| c).collect(),
            Element::Characteristic(eta) => eta.iter().collect(),
        }
    }

    pub fn coords(&self) -> Vec<(ElementKey, GaussRat)> {
        match self {
            Element::Operator(r) => r.coords(),
            Element::Characteristic(eta) => eta
                .iter()
                .enumerate()
                .flat_map(|(a, c)| {
                    c.coeff_extract()
                        .into_iter()
                        .map(move |(w, m, x)| ((vec![a as u32], w, m), x))
                })
                .collect(),
        }
    }

    pub fn linear_combination(basis: &[Element], coeffs: &[GaussRat]) -> Element {
        let mut out = basis[0].zero_like();
        for (b, c) in basis.iter().zip(coeffs) {
            if !c.is_zero() {
                out = out.add(&b.scale(c));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Element::Operator(r) => r.to_json(),
            Element::Characteristic(eta) => {
                serde_json::Value::Array(eta.iter().map(ExpPoly::to_json).collect())
            }
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Operator(r) => write!(f, "{r}"),
            Element::Characteristic(eta) if eta.len() == 1 => write!(f, "{}", eta[0]),
            Element::Characteristic(eta) => {
                let parts: Vec<String> = eta.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Coordinate matrix (one column per element) over the union of keys.
pub fn coordinate_matrix(elements: &[&Element]) -> (BTreeMap<ElementKey, usize>, ExactMatrix) {
    let mut keys = BTreeMap::new();
    let coords: Vec<_> = elements.iter().map(|e| e.coords()).collect();
    for c in &coords {
        for (k, _) in c {
            let n = keys.len();
            keys.entry(k.clone()).or_insert(n);
        }
    }
    // renumber in key order so the matrix does not depend on element order
    for (i, v) in keys.values_mut().enumerate() {
        *v = i;
    }
    let mut m = ExactMatrix::zeros(keys.len(), elements.len());
    for (j, c) in coords.into_iter().enumerate() {
        for (k, x) in c {
            m[(keys[&k], j)] = x;
        }
    }
    (keys, m)
}

/// Exact rank of a family of elements.
pub fn rank_of(elements: &[&Element]) -> usize {
    if elements.is_empty() {
        return 0;
    }
    coordinate_matrix(elements).1.rank()
}

/// Coordinates of each target in the (independent) basis; `Err(i)` names
/// the first target outside the span.
pub fn express_in(basis: &[Element], targets: &[Element]) -> Result<Vec<Vec<GaussRat>>, usize> {
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let all: Vec<&Element> = basis.iter().chain(targets).collect();
    let (_, m) = coordinate_matrix(&all);
    let n = basis.len();
    let a = ExactMatrix::from_columns(m.rows(), &(0..n).map(|j| m.column(j)).collect::<Vec<_>>());
    let b = ExactMatrix::from_columns(
        m.rows(),
        &(n..all.len()).map(|j| m.column(j)).collect::<Vec<_>>(),
    );
    if n == 0 {
        return match targets.iter().position(|t| !t.is_zero()) {
            Some(i) => Err(i),
            None => Ok(vec![Vec::new(); targets.len()]),
        };
    }
    match a.solve(&b) {
        Ok(x) => Ok((0..targets.len()).map(|j| x.column(j)).collect()),
        Err(crate::linalg::LinalgError::Inconsistent { column }) => Err(column),
        Err(e) => panic!("basis is not independent: {e}"),
    }
}

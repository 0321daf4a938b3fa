use std::collections::BTreeMap;
use std::sync::Arc;

use super::element::{express_in, rank_of, Element, SpaceKind};
use super::StructureError;
use crate::field::GaussRat;
use crate::linalg::ExactMatrix;
use crate::poly::{VarContext, VarId};

/// A finite-dimensional space of symmetries with an ordered basis, an
/// optional order filtration and the designated translation variables.
#[derive(Debug, Clone)]
pub struct SymmetrySpace {
    kind: SpaceKind,
    ctx: Arc<VarContext>,
    translations: Vec<VarId>,
    basis: Vec<Element>,
    /// `q -> v^(q)`: the first `v^(q)` basis elements span `V^(q)`.
    filtration: BTreeMap<usize, usize>,
}

impl SymmetrySpace {
    pub fn new(
        kind: SpaceKind,
        ctx: &Arc<VarContext>,
        basis: Vec<Element>,
        translations: Vec<VarId>,
    ) -> Result<Self, StructureError> {
        for z in &translations {
            if ctx.translation_slot(*z).is_none() {
                return Err(StructureError::NotTranslationVariable(ctx.name(*z).to_string()));
            }
        }
        for e in &basis {
            if e.kind() != kind {
                return Err(StructureError::KindMismatch);
            }
            if !crate::poly::same_context(e.ctx(), ctx) {
                return Err(StructureError::ContextMismatch);
            }
        }
        let refs: Vec<&Element> = basis.iter().collect();
        if rank_of(&refs) != basis.len() {
            return Err(StructureError::NotIndependent);
        }
        Ok(SymmetrySpace {
            kind,
            ctx: ctx.clone(),
            translations,
            basis,
            filtration: BTreeMap::new(),
        })
    }

    /// Builds the filtered space from per-order bases `V^(q)` (ascending q).
    /// Each level must contain the previous one; the combined basis extends
    /// the basis of each lower level by the new elements of the next.
    pub fn from_levels(
        kind: SpaceKind,
        ctx: &Arc<VarContext>,
        levels: Vec<(usize, Vec<Element>)>,
        translations: Vec<VarId>,
    ) -> Result<Self, StructureError> {
        let mut space = SymmetrySpace::new(kind, ctx, Vec::new(), translations)?;
        let mut last_q = None;
        for (q, level) in levels {
            if last_q.is_some_and(|p| q <= p) {
                return Err(StructureError::NotNested { order: q });
            }
            last_q = Some(q);
            let level_refs: Vec<&Element> = level.iter().collect();
            let level_rank = rank_of(&level_refs);
            if express_in(&level_with_rank(&level), &space.basis).is_err() {
                return Err(StructureError::NotNested { order: q });
            }
            for e in level {
                let mut trial: Vec<&Element> = space.basis.iter().collect();
                trial.push(&e);
                if rank_of(&trial) > space.basis.len() {
                    space.basis.push(e);
                }
            }
            debug_assert_eq!(space.basis.len(), level_rank);
            space.filtration.insert(q, space.basis.len());
        }
        for e in &space.basis {
            if e.kind() != kind || !crate::poly::same_context(e.ctx(), ctx) {
                return Err(StructureError::KindMismatch);
            }
        }
        Ok(space)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn translations(&self) -> &[VarId] {
        &self.translations
    }

    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn filtration(&self) -> &BTreeMap<usize, usize> {
        &self.filtration
    }

    pub fn dimension(&self, q: usize) -> Option<usize> {
        self.filtration.get(&q).copied()
    }

    /// The sub-space `V^(q)` with the filtration truncated at `q`.
    pub fn level(&self, q: usize) -> Result<SymmetrySpace, StructureError> {
        let v = self.dimension(q).ok_or(StructureError::UnknownOrder(q))?;
        Ok(SymmetrySpace {
            kind: self.kind,
            ctx: self.ctx.clone(),
            translations: self.translations.clone(),
            basis: self.basis[..v].to_vec(),
            filtration: self.filtration.range(..=q).map(|(&a, &b)| (a, b)).collect(),
        })
    }

    pub fn coordinates(&self, e: &Element) -> Option<Vec<GaussRat>> {
        express_in(&self.basis, std::slice::from_ref(e))
            .ok()
            .map(|mut v| v.remove(0))
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.coordinates(e).is_some()
    }

    /// Matrix of `d/dz` on the space: column `j` holds the coordinates of
    /// the derivative of basis element `j`.
    pub fn adjoint_matrix(&self, z: VarId) -> Result<ExactMatrix, StructureError> {
        let n = self.dim();
        if n == 0 {
            return Ok(ExactMatrix::zeros(0, 0));
        }
        let images: Vec<Element> = self.basis.iter().map(|b| b.partial(z)).collect();
        match express_in(&self.basis, &images) {
            Ok(cols) => Ok(ExactMatrix::from_columns(n, &cols)),
            Err(i) => Err(StructureError::ClosureViolation {
                element: i,
                variable: self.ctx.name(z).to_string(),
                residual: images[i].to_string(),
            }),
        }
    }

    /// Adjoint matrices of all translation variables, checked to commute.
    pub fn adjoint_matrices(&self) -> Result<Vec<ExactMatrix>, StructureError> {
        let gs = self
            .translations
            .iter()
            .map(|&z| self.adjoint_matrix(z))
            .collect::<Result<Vec<_>, _>>()?;
        for a in 0..gs.len() {
            for b in a + 1..gs.len() {
                if !gs[a].commutes_with(&gs[b]) {
                    return Err(StructureError::NotCommuting {
                        first: self.ctx.name(self.translations[a]).to_string(),
                        second: self.ctx.name(self.translations[b]).to_string(),
                    });
                }
            }
        }
        Ok(gs)
    }
}

/// An independent sub-list with the same span (for nesting checks).
fn level_with_rank(level: &[Element]) -> Vec<Element> {
    let mut out: Vec<Element> = Vec::new();
    for e in level {
        let mut trial: Vec<&Element> = out.iter().collect();
        trial.push(e);
        if rank_of(&trial) > out.len() {
            out.push(e.clone());
        }
    }
    out
}

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::PolyError;

/// Index of a variable inside a [`VarContext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarKind {
    Independent,
    Dependent { alpha: usize },
    /// Jet coordinate `u_{alpha,J}` with `|J| >= 1`.
    Jet { alpha: usize, multi: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
}

impl Var {
    pub fn independent(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            kind: VarKind::Independent,
        }
    }
}

/// Ordered variable declarations shared by a family of polynomials.
///
/// Declaration order is the monomial order (first declared = most
/// significant in graded-lex). A subset of independent/dependent variables
/// is designated as translation variables; only those may carry an
/// exponential weight.
#[derive(Clone, PartialEq, Eq)]
pub struct VarContext {
    vars: Vec<Var>,
    translations: Vec<VarId>,
    slot_of: Vec<Option<usize>>,
    by_name: HashMap<String, VarId>,
}

impl VarContext {
    pub fn new(vars: Vec<Var>, translations: &[&str]) -> Result<Arc<Self>, PolyError> {
        let mut by_name = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if by_name.insert(v.name.clone(), VarId(i)).is_some() {
                return Err(PolyError::DuplicateVariable(v.name.clone()));
            }
        }
        let mut slot_of = vec![None; vars.len()];
        let mut tr = Vec::with_capacity(translations.len());
        for (slot, name) in translations.iter().enumerate() {
            let id = *by_name
                .get(*name)
                .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
            if matches!(vars[id.0].kind, VarKind::Jet { .. }) {
                return Err(PolyError::BadTranslation(name.to_string()));
            }
            if slot_of[id.0].is_some() {
                return Err(PolyError::DuplicateVariable(name.to_string()));
            }
            slot_of[id.0] = Some(slot);
            tr.push(id);
        }
        Ok(Arc::new(VarContext {
            vars,
            translations: tr,
            slot_of,
            by_name,
        }))
    }

    /// A context of independent variables only.
    pub fn independents(names: &[&str], translations: &[&str]) -> Result<Arc<Self>, PolyError> {
        Self::new(names.iter().map(|n| Var::independent(*n)).collect(), translations)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &Var {
        &self.vars[id.0]
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.vars[id.0].name
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Result<VarId, PolyError> {
        self.lookup(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    pub fn translations(&self) -> &[VarId] {
        &self.translations
    }

    /// Number of translation variables, i.e. the length of every weight vector.
    pub fn weight_len(&self) -> usize {
        self.translations.len()
    }

    pub fn translation_slot(&self, id: VarId) -> Option<usize> {
        self.slot_of.get(id.0).copied().flatten()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len()).map(VarId)
    }
}

impl fmt::Debug for VarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.vars.iter().map(|v| v.name.as_str()).collect();
        let tr: Vec<&str> = self.translations.iter().map(|&t| self.name(t)).collect();
        f.debug_struct("VarContext")
            .field("vars", &names)
            .field("translations", &tr)
            .finish()
    }
}

pub(crate) fn same_context(a: &Arc<VarContext>, b: &Arc<VarContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

use std::sync::Arc;

use num_traits::{One, Zero};

use super::charpoly::{char_poly, gaussian_roots, nilpotency_index};
use super::{ExactMatrix, LinalgError, UniPoly};
use crate::field::GaussRat;
use crate::poly::{ExpPoly, Monomial, MultiPoly, VarContext, VarId, Weight};

/// One common primary component `I_gamma` of a commuting family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// Columns span the component inside the ambient space.
    pub basis: ExactMatrix,
    /// Eigenvalue of each family member on this component.
    pub eigenvalues: Vec<GaussRat>,
    /// Nilpotency index `k` of `(G_s - lambda_s)` on this component.
    pub nilpotency: Vec<usize>,
    /// Matrix of each family member restricted to the component, in the
    /// coordinates given by `basis`.
    pub restricted: Vec<ExactMatrix>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

/// A component left undecomposed because the characteristic polynomial of
/// family member `matrix` has no root in `Q(i)` there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unresolved {
    pub basis: ExactMatrix,
    pub matrix: usize,
    pub factor: UniPoly,
    /// Eigenvalues already fixed for the members before `matrix`.
    pub eigenvalues: Vec<GaussRat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub ambient_dim: usize,
    pub blocks: Vec<Block>,
    pub unresolved: Vec<Unresolved>,
}

impl BlockDecomposition {
    /// Number of blocks, `rho`.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Block::dim).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.unresolved.is_empty()
    }

    /// All block bases side by side (resolved blocks first).
    pub fn change_of_basis(&self) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(self.ambient_dim, 0);
        for b in &self.blocks {
            m = m.hstack(&b.basis);
        }
        for u in &self.unresolved {
            m = m.hstack(&u.basis);
        }
        m
    }
}

/// Matrix of `g` restricted to the invariant subspace spanned by the
/// columns of `basis`.
pub fn restrict(g: &ExactMatrix, basis: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
    if basis.cols() == 0 {
        return Ok(ExactMatrix::zeros(0, 0));
    }
    basis.solve(&(g * basis)).map_err(|e| match e {
        LinalgError::Inconsistent { .. } => LinalgError::NotInvariant,
        other => other,
    })
}

/// Common primary decomposition of a family of pairwise commuting matrices.
///
/// Each member splits every current component into its generalized
/// eigenspaces `ker (G - lambda)^mult`; commuting members preserve one
/// another's generalized eigenspaces, so the refinement terminates in
/// common components on which every member is `lambda * I + nilpotent`.
pub fn common_decompose(family: &[ExactMatrix]) -> Result<BlockDecomposition, LinalgError> {
    let n = match family.first() {
        Some(g) => g.rows(),
        None => {
            return Err(LinalgError::EmptyFamily);
        }
    };
    for g in family {
        if !g.is_square() || g.rows() != n {
            return Err(LinalgError::NonSquare {
                rows: g.rows(),
                cols: g.cols(),
            });
        }
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if !family[i].commutes_with(&family[j]) {
                return Err(LinalgError::NotCommuting { first: i, second: j });
            }
        }
    }

    let mut comps: Vec<(ExactMatrix, Vec<GaussRat>)> = Vec::new();
    if n > 0 {
        comps.push((ExactMatrix::identity(n), Vec::new()));
    }
    let mut unresolved = Vec::new();
    for (s, g) in family.iter().enumerate() {
        let mut next = Vec::new();
        for (basis, eig) in comps {
            let local = restrict(g, &basis)?;
            let split = gaussian_roots(&char_poly(&local)?);
            for (lambda, mult) in &split.roots {
                let kernel = local.shift(lambda).pow(*mult).kernel_matrix();
                let mut e = eig.clone();
                e.push(lambda.clone());
                next.push((&basis * &kernel, e));
            }
            if split.residual.degree().unwrap_or(0) > 0 {
                let kernel = split.residual.eval_matrix(&local).kernel_matrix();
                unresolved.push(Unresolved {
                    basis: &basis * &kernel,
                    matrix: s,
                    factor: split.residual.clone(),
                    eigenvalues: eig.clone(),
                });
            }
        }
        comps = next;
    }

    let mut blocks = Vec::with_capacity(comps.len());
    for (basis, eigenvalues) in comps {
        let mut restricted = Vec::with_capacity(family.len());
        let mut nilpotency = Vec::with_capacity(family.len());
        for (g, lambda) in family.iter().zip(&eigenvalues) {
            let local = restrict(g, &basis)?;
            let k = nilpotency_index(&local, lambda).ok_or(LinalgError::NotNilpotentAtLambda)?;
            nilpotency.push(k);
            restricted.push(local);
        }
        blocks.push(Block {
            basis,
            eigenvalues,
            nilpotency,
            restricted,
        });
    }
    blocks.sort_by(|a, b| {
        a.eigenvalues
            .cmp(&b.eigenvalues)
            .then_with(|| a.dim().cmp(&b.dim()))
    });
    Ok(BlockDecomposition {
        ambient_dim: n,
        blocks,
        unresolved,
    })
}

/// Square matrix of exponential-polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpPolyMatrix {
    pub entries: Vec<Vec<ExpPoly>>,
}

impl ExpPolyMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn partial(&self, v: VarId) -> ExpPolyMatrix {
        ExpPolyMatrix {
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e.partial(v)).collect())
                .collect(),
        }
    }

    /// `m * self` for a constant matrix `m`.
    pub fn left_mul(&self, m: &ExactMatrix) -> ExpPolyMatrix {
        let n = self.dim();
        let ctx = self.entries[0][0].ctx().clone();
        let mut entries = vec![vec![ExpPoly::zero(&ctx); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for k in 0..n {
                    cell.add_scaled(&self.entries[k][j], &m[(i, k)]);
                }
            }
        }
        ExpPolyMatrix { entries }
    }

    pub fn mul(&self, o: &ExpPolyMatrix) -> ExpPolyMatrix {
        let n = self.dim();
        let ctx = self.entries[0][0].ctx().clone();
        let mut entries = vec![vec![ExpPoly::zero(&ctx); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for k in 0..n {
                    let p = &self.entries[i][k] * &o.entries[k][j];
                    cell.add_scaled(&p, &GaussRat::one());
                }
            }
        }
        ExpPolyMatrix { entries }
    }
}

/// Truncated exponential `exp(G z) = exp(lambda z) sum_{s<k} z^s/s! (G - lambda)^s`
/// for a matrix with `(G - lambda)^k = 0`.
///
/// `z` must be a translation variable of `ctx` unless `lambda = 0`.
pub fn block_exp(
    g: &ExactMatrix,
    lambda: &GaussRat,
    k: usize,
    z: VarId,
    ctx: &Arc<VarContext>,
) -> Result<ExpPolyMatrix, LinalgError> {
    if !g.is_square() {
        return Err(LinalgError::NonSquare {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    let n = g.rows();
    let nil = g.shift(lambda);
    if !nil.pow(k).is_zero() {
        return Err(LinalgError::NotNilpotentAtLambda);
    }
    let mut weight = Weight::zero(ctx.weight_len());
    if !lambda.is_zero() {
        let slot = ctx
            .translation_slot(z)
            .ok_or_else(|| LinalgError::NotTranslationVariable(ctx.name(z).to_string()))?;
        weight.0[slot] = lambda.clone();
    }
    let mut entries = vec![vec![ExpPoly::zero(ctx); n]; n];
    let mut power = ExactMatrix::identity(n);
    let mut factorial = GaussRat::one();
    for s in 0..k.max(1) {
        if s > 0 {
            power = &power * &nil;
            factorial = &factorial * &GaussRat::from(s as i64);
        }
        let inv_fact = factorial.inv().expect("nonzero factorial");
        let mono = Monomial::var_pow(z, s as u32);
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let c = &power[(i, j)] * &inv_fact;
                if !c.is_zero() {
                    cell.add_scaled(
                        &ExpPoly::with_weight(ctx, weight.clone(), MultiPoly::term(mono.clone(), c)),
                        &GaussRat::one(),
                    );
                }
            }
        }
    }
    Ok(ExpPolyMatrix { entries })
}

use super::op::LinDiffOp;
use super::LinopError;
use crate::field::GaussRat;
use crate::poly::{ExpPoly, VarId};

/// `{A, p} = A p + p A` with `p = -i d_x`.
fn anticommute_p(a: &LinDiffOp, x: VarId) -> LinDiffOp {
    let ctx = a.ctx();
    let p = LinDiffOp::partial_op(ctx, x).scale(&-GaussRat::i());
    let ap = a.compose(&p).expect("same context");
    let pa = p.compose(a).expect("same context");
    ap.add(&pa)
}

/// `{...{h, p}, ..., p}` with `j` anticommutators.
pub fn nested_anticommutator(h: &ExpPoly, j: usize, x: VarId) -> LinDiffOp {
    let mut op = LinDiffOp::multiplication(h.clone());
    for _ in 0..j {
        op = anticommute_p(&op, x);
    }
    op
}

/// `sum_j {...{h_j, p}, ..., p}`.
pub fn from_h_form(hs: &[ExpPoly], x: VarId) -> LinDiffOp {
    assert!(!hs.is_empty(), "at least h_0 is required");
    let mut out = LinDiffOp::zero(hs[0].ctx());
    for (j, h) in hs.iter().enumerate() {
        out = out.add(&nested_anticommutator(h, j, x));
    }
    out
}

/// Inverse of [`from_h_form`] for operators `sum a_s d_x^s`. The leading
/// coefficient of the `j`-fold anticommutator is `(-2i)^j h_j`, so the
/// `h_j` are peeled off from the top order down.
pub fn to_h_form(r: &LinDiffOp, x: VarId) -> Result<Vec<ExpPoly>, LinopError> {
    let ctx = r.ctx().clone();
    for (j, _) in r.terms() {
        if j.iter().enumerate().any(|(k, &e)| k != x.0 && e > 0) {
            return Err(LinopError::NotInHForm);
        }
    }
    let order = r.order().unwrap_or(0) as usize;
    let mut rest = r.clone();
    let mut hs = vec![ExpPoly::zero(&ctx); order + 1];
    let minus_two_i = GaussRat::from_parts((0, 1), (-2, 1));
    for j in (0..=order).rev() {
        let mut multi = vec![0; ctx.len()];
        multi[x.0] = j as u32;
        let lead = rest.coeff(&multi);
        if lead.is_zero() {
            continue;
        }
        let f = minus_two_i.pow(j as u32).inv().expect("nonzero");
        let h = lead.scale(&f);
        rest = rest.sub(&nested_anticommutator(&h, j, x));
        hs[j] = h;
    }
    debug_assert!(rest.is_zero());
    Ok(hs)
}

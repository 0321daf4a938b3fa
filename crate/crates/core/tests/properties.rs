use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use symkit::jet::{lie_bracket, total_derivative, GenVectorField, JetContext};
use symkit::linalg::{dense_to_sparse, ExactMatrix, SparseEliminator};
use symkit::linop::LinDiffOp;
use symkit::poly::{ExpPoly, Monomial, VarContext, VarId, Weight};
use symkit::GaussRat;

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-9i64..=9, 1i64..=6, -9i64..=9, 1i64..=6).prop_map(|(a, b, c, d)| GaussRat::from_parts((a, b), (c, d)))
}

fn small_gauss() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -2i64..=2).prop_map(|(a, b)| GaussRat::from_parts((a, 1), (b, 1)))
}

/// Raw term data: (weight index, exponents per variable, coefficient).
type RawTerm = (usize, Vec<u32>, GaussRat);

fn raw_poly(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Vec<RawTerm>> {
    prop::collection::vec(
        (0usize..3, prop::collection::vec(0..=max_exp, nvars), small_gauss()),
        0..=max_terms,
    )
}

/// Builds an exp-polynomial over the first `vars` of `ctx`; weight index 0
/// is the plain part, 1 and 2 are fixed weights on the translation slots.
fn build(ctx: &Arc<VarContext>, vars: &[VarId], raw: &[RawTerm]) -> ExpPoly {
    let weights = [
        Weight::zero(ctx.weight_len()),
        Weight(vec![GaussRat::from_int(1); ctx.weight_len()]),
        Weight(vec![GaussRat::i(); ctx.weight_len()]),
    ];
    let mut p = ExpPoly::zero(ctx);
    for (w, exps, c) in raw {
        let m = Monomial::from_pairs(vars.iter().copied().zip(exps.iter().copied()));
        let w = if ctx.weight_len() == 0 { &weights[0] } else { &weights[*w] };
        p.add_term(w.clone(), m, c.clone());
    }
    p
}

fn poly_ctx() -> Arc<VarContext> {
    VarContext::independents(&["t", "x", "y"], &["t", "x"]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms(a in gauss(), b in gauss(), c in gauss()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &a), &GaussRat::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), GaussRat::one());
        } else {
            prop_assert!(a.inv().is_err());
        }
        let s = a.to_string();
        prop_assert_eq!(s.parse::<GaussRat>().unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn polynomial_ring_laws(a in raw_poly(3, 2, 4), b in raw_poly(3, 2, 4), c in raw_poly(3, 2, 4)) {
        let ctx = poly_ctx();
        let v: Vec<VarId> = ctx.ids().collect();
        let (a, b, c) = (build(&ctx, &v, &a), build(&ctx, &v, &b), build(&ctx, &v, &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &ExpPoly::zero(&ctx), a.clone());
    }

    #[test]
    fn partials_commute(a in raw_poly(3, 3, 5), i in 0usize..3, j in 0usize..3) {
        let ctx = poly_ctx();
        let v: Vec<VarId> = ctx.ids().collect();
        let p = build(&ctx, &v, &a);
        prop_assert_eq!(p.partial(v[i]).partial(v[j]), p.partial(v[j]).partial(v[i]));
    }

    #[test]
    fn product_rule(a in raw_poly(3, 2, 3), b in raw_poly(3, 2, 3), i in 0usize..3) {
        let ctx = poly_ctx();
        let v: Vec<VarId> = ctx.ids().collect();
        let (a, b) = (build(&ctx, &v, &a), build(&ctx, &v, &b));
        let z = v[i];
        prop_assert_eq!((&a * &b).partial(z), &(&a.partial(z) * &b) + &(&a * &b.partial(z)));
    }

    #[test]
    fn coefficient_round_trip(a in raw_poly(3, 3, 6)) {
        let ctx = poly_ctx();
        let v: Vec<VarId> = ctx.ids().collect();
        let p = build(&ctx, &v, &a);
        let listed = p.coeff_extract();
        let keys: std::collections::BTreeSet<_> = listed.iter().map(|(w, m, _)| (w.clone(), m.clone())).collect();
        prop_assert_eq!(keys.len(), listed.len());
        prop_assert!(listed.iter().all(|(_, _, c)| !c.is_zero()));
        prop_assert_eq!(ExpPoly::from_coeffs(&ctx, listed), p);
    }

    #[test]
    fn sparse_and_dense_nullspaces_agree(rows in prop::collection::vec(prop::collection::vec(small_gauss(), 5), 0..6)) {
        let m = if rows.is_empty() { ExactMatrix::zeros(0, 5) } else { ExactMatrix::from_rows(rows.clone()) };
        let dense = m.nullspace();
        let mut e = SparseEliminator::new(5);
        for r in &rows {
            e.push(dense_to_sparse(r));
        }
        let sparse: Vec<Vec<GaussRat>> = e
            .nullspace()
            .into_iter()
            .map(|v| (0..5).map(|j| v.get(&j).cloned().unwrap_or_else(GaussRat::zero)).collect())
            .collect();
        prop_assert_eq!(&sparse, &dense);
        prop_assert_eq!(m.rank() + dense.len(), 5);
        for v in &dense {
            prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn rref_is_idempotent(rows in prop::collection::vec(prop::collection::vec(small_gauss(), 4), 1..5)) {
        let m = ExactMatrix::from_rows(rows);
        let r = m.rref().matrix;
        prop_assert_eq!(r.rref().matrix, r);
    }
}

// ---- jet calculus ----

fn jet_ctx() -> Arc<JetContext> {
    JetContext::new(&["t", "x"], &["u"], 5, &["x"]).unwrap()
}

/// Variables used for random low-order jet polynomials: t, x, u, u_t, u_x.
fn low_vars(c: &JetContext) -> Vec<VarId> {
    ["t", "x", "u", "u_t", "u_x"].iter().map(|n| c.var(n).unwrap()).collect()
}

/// Evaluates a jet polynomial along `u = f(t, x)`.
fn along(c: &JetContext, p: &ExpPoly, f: &ExpPoly) -> ExpPoly {
    let mut map = HashMap::new();
    for v in p.vars() {
        if let Some((_, multi)) = c.jet_of(v) {
            let mut d = f.clone();
            for (k, &j) in multi.iter().enumerate() {
                for _ in 0..j {
                    d = d.partial(c.x(k));
                }
            }
            map.insert(v, d);
        }
    }
    p.substitute_many(&map)
}

fn field(c: &Arc<JetContext>, raws: &[Vec<RawTerm>; 3]) -> GenVectorField {
    let v = low_vars(c);
    let xs = vec![build(c.vars(), &v, &raws[0]), build(c.vars(), &v, &raws[1])];
    GenVectorField::new(c, xs, vec![build(c.vars(), &v, &raws[2])]).unwrap()
}

fn raw_field() -> impl Strategy<Value = [Vec<RawTerm>; 3]> {
    [raw_poly(5, 1, 2), raw_poly(5, 1, 2), raw_poly(5, 2, 2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn total_derivatives_commute(a in raw_poly(5, 2, 4)) {
        let c = jet_ctx();
        let p = build(c.vars(), &low_vars(&c), &a);
        let dtx = total_derivative(&c, &total_derivative(&c, &p, 0).unwrap(), 1).unwrap();
        let dxt = total_derivative(&c, &total_derivative(&c, &p, 1).unwrap(), 0).unwrap();
        prop_assert_eq!(dtx, dxt);
    }

    #[test]
    fn total_derivative_matches_evaluation(a in raw_poly(5, 2, 4), l in 0usize..2) {
        let c = jet_ctx();
        let p = build(c.vars(), &low_vars(&c), &a);
        let (t, x) = (c.poly_var(c.x(0)), c.poly_var(c.x(1)));
        // u = t^2 x + 3 x^3 - t
        let f = &(&(&t * &t) * &x) + &(&x.pow(3).scale(&GaussRat::from_int(3)) - &t);
        let lhs = along(&c, &total_derivative(&c, &p, l).unwrap(), &f);
        let rhs = along(&c, &p, &f).partial(c.x(l));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lie_bracket_jacobi(a in raw_field(), b in raw_field(), d in raw_field()) {
        let c = jet_ctx();
        let (q1, q2, q3) = (field(&c, &a), field(&c, &b), field(&c, &d));
        let j1 = lie_bracket(&lie_bracket(&q1, &q2).unwrap(), &q3).unwrap();
        let j2 = lie_bracket(&lie_bracket(&q2, &q3).unwrap(), &q1).unwrap();
        let j3 = lie_bracket(&lie_bracket(&q3, &q1).unwrap(), &q2).unwrap();
        prop_assert!(j1.add(&j2).add(&j3).is_zero());
    }

    #[test]
    fn lie_bracket_bilinear_antisymmetric(a in raw_field(), b in raw_field(), d in raw_field(), s in small_gauss()) {
        let c = jet_ctx();
        let (q1, q2, q3) = (field(&c, &a), field(&c, &b), field(&c, &d));
        let lhs = lie_bracket(&q1.scale(&s).add(&q2), &q3).unwrap();
        let rhs = lie_bracket(&q1, &q3).unwrap().scale(&s).add(&lie_bracket(&q2, &q3).unwrap());
        prop_assert_eq!(lhs, rhs);
        let ab = lie_bracket(&q1, &q2).unwrap();
        let ba = lie_bracket(&q2, &q1).unwrap();
        prop_assert!(ab.add(&ba).is_zero());
    }

    #[test]
    fn prolongation_is_linear(a in raw_field(), b in raw_field(), s in small_gauss()) {
        let c = jet_ctx();
        let (q1, q2) = (field(&c, &a), field(&c, &b));
        let lhs = q1.scale(&s).add(&q2).prolong(2).unwrap();
        let p1 = q1.prolong(2).unwrap();
        let p2 = q2.prolong(2).unwrap();
        for (v, coeff) in &lhs.jets {
            prop_assert_eq!(coeff, &(&p1.jets[v].scale(&s) + &p2.jets[v]));
        }
    }
}

// ---- operators ----

fn op_ctx() -> Arc<VarContext> {
    VarContext::independents(&["t", "x"], &["t", "x"]).unwrap()
}

fn raw_op() -> impl Strategy<Value = Vec<(Vec<u32>, Vec<RawTerm>)>> {
    prop::collection::vec((prop::collection::vec(0u32..=2, 2), raw_poly(2, 2, 2)), 0..=3)
}

fn build_op(ctx: &Arc<VarContext>, raw: &[(Vec<u32>, Vec<RawTerm>)]) -> LinDiffOp {
    let vars: Vec<VarId> = ctx.ids().collect();
    let mut op = LinDiffOp::zero(ctx);
    for (j, coeff) in raw {
        op.add_term(j.clone(), build(ctx, &vars, coeff));
    }
    op
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn commutator_jacobi(a in raw_op(), b in raw_op(), d in raw_op()) {
        let ctx = op_ctx();
        let (x, y, z) = (build_op(&ctx, &a), build_op(&ctx, &b), build_op(&ctx, &d));
        let j = x.commutator(&y).unwrap().commutator(&z).unwrap()
            .add(&y.commutator(&z).unwrap().commutator(&x).unwrap())
            .add(&z.commutator(&x).unwrap().commutator(&y).unwrap());
        prop_assert!(j.is_zero());
    }

    #[test]
    fn composition_is_associative(a in raw_op(), b in raw_op(), d in raw_op()) {
        let ctx = op_ctx();
        let (x, y, z) = (build_op(&ctx, &a), build_op(&ctx, &b), build_op(&ctx, &d));
        prop_assert_eq!(
            x.compose(&y).unwrap().compose(&z).unwrap(),
            x.compose(&y.compose(&z).unwrap()).unwrap()
        );
    }

    #[test]
    fn composition_matches_application(a in raw_op(), b in raw_op(), f in raw_poly(2, 3, 3)) {
        let ctx = op_ctx();
        let vars: Vec<VarId> = ctx.ids().collect();
        let (x, y) = (build_op(&ctx, &a), build_op(&ctx, &b));
        let f = build(&ctx, &vars, &f);
        prop_assert_eq!(x.compose(&y).unwrap().apply_to(&f), x.apply_to(&y.apply_to(&f)));
    }
}

//! Randomized property suites: Weyl-algebra laws, symbolic-power
//! specialization, Gröbner reduction contracts, and the brute-force Koszul
//! oracle for regular sequences. Seeds are fixed, so every run checks the
//! same instances.

use std::sync::Arc;

use num::{BigInt, One, Zero};
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fdk_core::groebner::{
    buchberger, ideal_dimension, is_regular_sequence, Arithmetic, Budget, MonomialOrder,
};
use fdk_core::linalg::QMatrix;
use fdk_core::polyring::{rat_int, PolyMatrix, Polynomial, Rat, VarContext};
use fdk_core::weyl::{apply_to_symbolic_power, FiltrationKind, WeylContext, WeylOperator};

// ---------------------------------------------------------------------------
// random generators
// ---------------------------------------------------------------------------

fn random_poly(rng: &mut ChaCha8Rng, ctx: &Arc<VarContext>, max_terms: usize, max_exp: u32) -> Polynomial {
    let nterms = rng.gen_range(0..=max_terms);
    let mut p = Polynomial::zero(ctx);
    for _ in 0..nterms {
        let exp: Vec<u32> = (0..ctx.len()).map(|_| rng.gen_range(0..=max_exp)).collect();
        let num = rng.gen_range(-4i64..=4);
        if num == 0 {
            continue;
        }
        let den = rng.gen_range(1i64..=3);
        p = p
            .add(&Polynomial::monomial(ctx, exp, Rat::new(num.into(), den.into())))
            .unwrap();
    }
    p
}

fn random_operator(rng: &mut ChaCha8Rng, ctx: &Arc<WeylContext>, max_terms: usize, max_exp: i64) -> WeylOperator {
    let n = ctx.num_pairs();
    let nc = ctx.centrals().len();
    let nterms = rng.gen_range(1..=max_terms);
    let mut op = WeylOperator::zero(ctx);
    for _ in 0..nterms {
        let pos: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max_exp)).collect();
        let der: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=max_exp) as u32).collect();
        let cen: Vec<u32> = (0..nc).map(|_| rng.gen_range(0..=1) as u32).collect();
        let num = rng.gen_range(-3i64..=3);
        if num == 0 {
            continue;
        }
        op = op
            .add(&WeylOperator::term(ctx, pos, der, cen, rat_int(num)))
            .unwrap();
    }
    op
}

// ---------------------------------------------------------------------------
// Weyl-algebra laws (criterion 10: 100 random operators per law)
// ---------------------------------------------------------------------------

#[test]
fn weyl_commutation_relations() {
    let ctx = WeylContext::new(vec!["w1", "w2", "w3"], vec![]);
    for i in 0..3 {
        for j in 0..3 {
            let wj = WeylOperator::position(&ctx, &format!("w{}", j + 1)).unwrap();
            let di = WeylOperator::derivation(&ctx, &format!("w{}", i + 1)).unwrap();
            let comm = di.commutator(&wj).unwrap();
            let expect = if i == j {
                WeylOperator::one(&ctx)
            } else {
                WeylOperator::zero(&ctx)
            };
            assert_eq!(comm, expect, "[d{i}, w{j}]");
        }
    }
}

#[test]
fn weyl_associativity_100_random_triples() {
    let ctx = WeylContext::new(vec!["w1", "w2"], vec!["s"]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = random_operator(&mut rng, &ctx, 3, 2);
        let b = random_operator(&mut rng, &ctx, 3, 2);
        let c = random_operator(&mut rng, &ctx, 3, 2);
        let left = a.normal_product(&b).unwrap().normal_product(&c).unwrap();
        let right = a.normal_product(&b.normal_product(&c).unwrap()).unwrap();
        assert_eq!(left, right);
    }
}

#[test]
fn weyl_fourier_laplace_is_algebra_map_100_random_pairs() {
    let src = WeylContext::new(vec!["w1", "w2"], vec![]);
    let dst = WeylContext::new(vec!["l1", "l2"], vec![]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let a = random_operator(&mut rng, &src, 3, 2);
        let b = random_operator(&mut rng, &src, 3, 2);
        let fl_ab = a
            .normal_product(&b)
            .unwrap()
            .fourier_laplace(&dst, &[0, 1])
            .unwrap();
        let fa = a.fourier_laplace(&dst, &[0, 1]).unwrap();
        let fb = b.fourier_laplace(&dst, &[0, 1]).unwrap();
        assert_eq!(fl_ab, fa.normal_product(&fb).unwrap());
    }
}

#[test]
fn weyl_transpose_anti_automorphism_100_random_pairs() {
    let ctx = WeylContext::new(vec!["w1", "w2"], vec!["s"]);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let a = random_operator(&mut rng, &ctx, 3, 2);
        let b = random_operator(&mut rng, &ctx, 3, 2);
        let ab_t = a.normal_product(&b).unwrap().transpose();
        let expect = b.transpose().normal_product(&a.transpose()).unwrap();
        assert_eq!(ab_t, expect, "(ab)^T = b^T a^T");
        assert_eq!(a.transpose().transpose(), a, "involution");
    }
}

#[test]
fn weyl_action_is_module_action() {
    let ctx = WeylContext::new(vec!["w1", "w2"], vec![]);
    let pctx = ctx.position_context();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let a = random_operator(&mut rng, &ctx, 3, 2);
        let b = random_operator(&mut rng, &ctx, 3, 2);
        let p = random_poly(&mut rng, &pctx, 4, 3);
        let composed = a.normal_product(&b).unwrap().apply(&p).unwrap();
        let nested = a.apply(&b.apply(&p).unwrap()).unwrap();
        assert_eq!(composed, nested);
    }
}

#[test]
fn principal_symbol_is_multiplicative() {
    let ctx = WeylContext::new(vec!["w1", "w2"], vec!["s"]);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for kind in [FiltrationKind::Order, FiltrationKind::TotalOrder] {
        for _ in 0..50 {
            let a = random_operator(&mut rng, &ctx, 3, 2);
            let b = random_operator(&mut rng, &ctx, 3, 2);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let lhs = a.normal_product(&b).unwrap().principal_symbol(kind);
            let rhs = a
                .principal_symbol(kind)
                .multiply(&b.principal_symbol(kind))
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

// ---------------------------------------------------------------------------
// symbolic powers: integer specialization (criterion 10)
// ---------------------------------------------------------------------------

#[test]
fn symbolic_power_integer_specialization() {
    // class(op, h) evaluated at s = k must reproduce op(h^k) exactly for
    // k <= n + 2.
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["w1", "w2"], "w1*w2"),
        (vec!["w1", "w2", "w3"], "w1*w2*w3"),
        (vec!["w1", "w2"], "w1^2 + w2^2"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (vars, h_text) in cases {
        let n = vars.len();
        let ctx = WeylContext::new(vars.clone(), vec![]);
        let pctx = ctx.position_context();
        let h = fdk_core::parse::parse_polynomial(h_text, &pctx).unwrap();
        for _ in 0..20 {
            let op = random_operator(&mut rng, &ctx, 2, 2);
            let class = apply_to_symbolic_power(&op, &h).unwrap();
            for k in (class.shift as i64)..=(n as i64 + 2) {
                let payload_at_k = class
                    .payload
                    .eval_var("s", &rat_int(k))
                    .unwrap()
                    .map_variables(&pctx, &(0..n).collect::<Vec<_>>());
                let expected = h
                    .pow((k - class.shift as i64) as u32)
                    .multiply(&payload_at_k)
                    .unwrap();
                let actual = op.apply(&h.pow(k as u32)).unwrap();
                assert_eq!(actual, expected, "op = {op}, k = {k}");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Gröbner contracts (criterion 10)
// ---------------------------------------------------------------------------

fn mono_poly(ctx: &Arc<VarContext>, exp: Vec<u32>) -> Polynomial {
    Polynomial::monomial(ctx, exp, Rat::one())
}

#[test]
fn groebner_s_pairs_and_membership_reduce_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let ctx = VarContext::new(vec!["x", "y", "z"]);
    let order = MonomialOrder::degrevlex(3);
    for _ in 0..25 {
        let gens: Vec<Polynomial> = (0..rng.gen_range(2..=3))
            .map(|_| random_poly(&mut rng, &ctx, 3, 2))
            .filter(|p| !p.is_zero())
            .collect();
        if gens.is_empty() {
            continue;
        }
        let gb = buchberger(&gens, &order, &Budget::unlimited()).unwrap();
        // Original generators are members.
        for g in &gens {
            assert!(gb.contains(g), "generator must reduce to zero");
        }
        // Every S-pair of the reduced basis reduces to zero.
        let lms = gb.leading_monomials();
        for i in 0..gb.elements.len() {
            for j in (i + 1)..gb.elements.len() {
                let lcm: Vec<u32> = lms[i]
                    .iter()
                    .zip(&lms[j])
                    .map(|(a, b)| *a.max(b))
                    .collect();
                let si: Vec<u32> = lcm.iter().zip(&lms[i]).map(|(a, b)| a - b).collect();
                let sj: Vec<u32> = lcm.iter().zip(&lms[j]).map(|(a, b)| a - b).collect();
                let spoly = mono_poly(&ctx, si)
                    .multiply(&gb.elements[i])
                    .unwrap()
                    .sub(&mono_poly(&ctx, sj).multiply(&gb.elements[j]).unwrap())
                    .unwrap();
                assert!(gb.contains(&spoly), "S-pair must reduce to zero");
            }
        }
    }
}

#[test]
fn ideal_dimension_is_order_invariant() {
    let ctx = VarContext::new(vec!["x", "y", "z"]);
    let instances: Vec<Vec<&str>> = vec![
        vec!["x*y"],
        vec!["x^2 - y*z", "y^2"],
        vec!["x", "y^2 - z^2"],
        vec!["x*y - z^2"],
        vec!["x^2", "x*y", "y^2"],
        vec!["x + y + z", "x*y"],
    ];
    for gens_text in instances {
        let gens: Vec<Polynomial> = gens_text
            .iter()
            .map(|t| fdk_core::parse::parse_polynomial(t, &ctx).unwrap())
            .collect();
        let d1 = ideal_dimension(
            &buchberger(&gens, &MonomialOrder::degrevlex(3), &Budget::unlimited()).unwrap(),
        );
        let d2 = ideal_dimension(
            &buchberger(&gens, &MonomialOrder::lex(3), &Budget::unlimited()).unwrap(),
        );
        assert_eq!(d1, d2, "dimension must not depend on the order: {gens_text:?}");
    }
}

// ---------------------------------------------------------------------------
// brute-force Koszul oracle for regular sequences (criterion 10)
// ---------------------------------------------------------------------------

/// Dimension of the space of homogeneous syzygies of total degree `deg`:
/// tuples (a_1..a_k) with sum a_i g_i = 0, deg(a_i) = deg - deg(g_i).
fn syzygy_space(gens: &[Polynomial], deg: u64) -> Vec<Vec<Rat>> {
    let ctx = gens[0].context().clone();
    let nvars = ctx.len();
    // Coordinates: for each generator, the monomials of the right degree.
    let monomials_of = |d: i64| -> Vec<Vec<u32>> {
        if d < 0 {
            return vec![];
        }
        let mut out = Vec::new();
        let mut current = vec![0u32; nvars];
        fn rec(i: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i + 1 == current.len() {
                current[i] = left;
                out.push(current.clone());
                return;
            }
            for e in 0..=left {
                current[i] = e;
                rec(i + 1, left - e, current, out);
            }
        }
        rec(0, d as u32, &mut current, &mut out);
        out
    };
    let mut columns: Vec<Polynomial> = Vec::new();
    for g in gens {
        let dg = g.total_degree().unwrap_or(0);
        for m in monomials_of(deg as i64 - dg as i64) {
            columns.push(mono_poly(&ctx, m).multiply(g).unwrap());
        }
    }
    if columns.is_empty() {
        return vec![];
    }
    // Rows: monomials of total degree `deg`.
    let rows_idx: std::collections::BTreeMap<Vec<u32>, usize> = monomials_of(deg as i64)
        .into_iter()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let mut m = QMatrix::zeros(rows_idx.len(), columns.len());
    for (cidx, col) in columns.iter().enumerate() {
        for (e, c) in col.terms() {
            let r = rows_idx[e];
            let v = m.at(r, cidx) + c;
            m.set(r, cidx, v);
        }
    }
    m.kernel_basis()
}

/// Brute-force first Koszul homology vanishing in all degrees up to a bound:
/// every homogeneous syzygy must be a combination of the trivial (Koszul)
/// syzygies g_j e_i - g_i e_j.
fn koszul_h1_vanishes(gens: &[Polynomial], max_deg: u64) -> bool {
    let ctx = gens[0].context().clone();
    let nvars = ctx.len();
    let k = gens.len();
    let monomials_of = |d: i64| -> Vec<Vec<u32>> {
        if d < 0 {
            return vec![];
        }
        let mut out = Vec::new();
        let mut current = vec![0u32; nvars];
        fn rec(i: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i + 1 == current.len() {
                current[i] = left;
                out.push(current.clone());
                return;
            }
            for e in 0..=left {
                current[i] = e;
                rec(i + 1, left - e, current, out);
            }
        }
        rec(0, d as u32, &mut current, &mut out);
        out
    };
    for deg in 1..=max_deg {
        let syz = syzygy_space(gens, deg);
        if syz.is_empty() {
            continue;
        }
        // Coordinates of a syzygy: per generator, coefficients on the
        // monomials of degree deg - deg(g_i).
        let mut offsets = vec![0usize; k + 1];
        let mut slot_monos: Vec<Vec<Vec<u32>>> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let dg = g.total_degree().unwrap_or(0);
            let monos = monomials_of(deg as i64 - dg as i64);
            offsets[i + 1] = offsets[i] + monos.len();
            slot_monos.push(monos);
        }
        let total = offsets[k];
        // Koszul syzygies: for i < j and each monomial m of degree
        // deg - deg(g_i) - deg(g_j): m*(g_j e_i - g_i e_j).
        let mut boundaries: Vec<Vec<Rat>> = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                let di = gens[i].total_degree().unwrap_or(0);
                let dj = gens[j].total_degree().unwrap_or(0);
                for m in monomials_of(deg as i64 - di as i64 - dj as i64) {
                    let mut v = vec![Rat::zero(); total];
                    let mi = mono_poly(&ctx, m.clone()).multiply(&gens[j]).unwrap();
                    for (e, c) in mi.terms() {
                        let slot = slot_monos[i].iter().position(|x| x == e).unwrap();
                        v[offsets[i] + slot] = c.clone();
                    }
                    let mj = mono_poly(&ctx, m).multiply(&gens[i]).unwrap();
                    for (e, c) in mj.terms() {
                        let slot = slot_monos[j].iter().position(|x| x == e).unwrap();
                        v[offsets[j] + slot] = -c.clone();
                    }
                    boundaries.push(v);
                }
            }
        }
        // rank of boundaries must equal dim of syzygies in this degree.
        let dim_syz = syz.len();
        let rank_bd = if boundaries.is_empty() {
            0
        } else {
            QMatrix::from_rows(boundaries).rank()
        };
        if rank_bd < dim_syz {
            return false;
        }
        assert!(rank_bd <= dim_syz, "Koszul boundaries are syzygies");
    }
    true
}

#[test]
fn regular_sequence_agrees_with_koszul_oracle() {
    let ctx3 = VarContext::new(vec!["x", "y", "z"]);
    let corpus: Vec<Vec<&str>> = vec![
        vec!["x"],
        vec!["x", "y"],
        vec!["x", "y", "z"],
        vec!["x*y"],
        vec!["x*y", "x*z"],
        vec!["x*y", "z"],
        vec!["x^2", "x*y"],
        vec!["x^2 + y^2", "z"],
        vec!["x^2 - y*z", "y^2"],
        vec!["x^2", "y^2", "z^2"],
        vec!["x + y", "x - y"],
        vec!["x + y", "x + y + z", "z^2"],
        vec!["x^2 + y*z", "x*y", "z"],
        vec!["x*z", "y*z"],
        vec!["x^2 - y^2", "x*y"],
    ];
    for gens_text in corpus {
        let gens: Vec<Polynomial> = gens_text
            .iter()
            .map(|t| fdk_core::parse::parse_polynomial(t, &ctx3).unwrap())
            .collect();
        let fast = is_regular_sequence(&gens, Arithmetic::Exact, &Budget::unlimited())
            .unwrap()
            .regular;
        let max_deg: u64 = gens.iter().map(|g| g.total_degree().unwrap_or(0)).sum::<u64>() + 2;
        let oracle = koszul_h1_vanishes(&gens, max_deg);
        assert_eq!(fast, oracle, "disagreement on {gens_text:?}");
    }
}

// ---------------------------------------------------------------------------
// polyring laws (proptest)
// ---------------------------------------------------------------------------

fn poly_strategy() -> impl Strategy<Value = Polynomial> {
    let ctx = VarContext::new(vec!["x", "y"]);
    proptest::collection::vec(
        ((0u32..4, 0u32..4), -5i64..=5, 1i64..=3),
        0..5,
    )
    .prop_map(move |terms| {
        let mut p = Polynomial::zero(&ctx);
        for ((ex, ey), num, den) in terms {
            if num == 0 {
                continue;
            }
            p = p
                .add(&Polynomial::monomial(
                    &ctx,
                    vec![ex, ey],
                    Rat::new(num.into(), den.into()),
                ))
                .unwrap();
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(&ab_c, &a_bc);
        let dist = a.multiply(&b.add(&c).unwrap()).unwrap();
        let expand = a.multiply(&b).unwrap().add(&a.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(&dist, &expand);
        prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
    }

    #[test]
    fn leibniz_identity(a in poly_strategy(), b in poly_strategy()) {
        let prod = a.multiply(&b).unwrap();
        let lhs = prod.differentiate("x").unwrap();
        let rhs = a
            .differentiate("x").unwrap()
            .multiply(&b).unwrap()
            .add(&a.multiply(&b.differentiate("x").unwrap()).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gcd_divides_and_scales(a in poly_strategy(), b in poly_strategy(), g in poly_strategy()) {
        if !a.is_zero() || !b.is_zero() {
            let d = Polynomial::gcd(&a, &b).unwrap();
            if !a.is_zero() {
                prop_assert!(d.divides(&a));
            }
            if !b.is_zero() {
                prop_assert!(d.divides(&b));
            }
            if !g.is_zero() && !a.is_zero() && !b.is_zero() {
                let ag = a.multiply(&g).unwrap();
                let bg = b.multiply(&g).unwrap();
                let lhs = Polynomial::gcd(&ag, &bg).unwrap();
                let rhs = g.normalize_monic().multiply(&d).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// determinant vs. permutation-sum oracle
// ---------------------------------------------------------------------------

fn permutation_sum_det(m: &PolyMatrix) -> Polynomial {
    let n = m.rows;
    let ctx = m.at(0, 0).context().clone();
    let mut total = Polynomial::zero(&ctx);
    let mut perm: Vec<usize> = (0..n).collect();
    fn visit(
        perm: &mut Vec<usize>,
        k: usize,
        sign: i64,
        m: &PolyMatrix,
        total: &mut Polynomial,
        ctx: &Arc<VarContext>,
    ) {
        let n = perm.len();
        if k == n {
            let mut prod = Polynomial::constant(ctx, rat_int(sign));
            for (r, &c) in perm.iter().enumerate() {
                prod = prod.multiply(m.at(r, c)).unwrap();
            }
            *total = total.add(&prod).unwrap();
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            let s = if i == k { sign } else { -sign };
            visit(perm, k + 1, s, m, total, ctx);
            perm.swap(k, i);
        }
    }
    visit(&mut perm, 0, 1, m, &mut total, &ctx);
    total
}

#[test]
fn determinant_matches_permutation_sum_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let ctx = VarContext::new(vec!["x", "y", "z"]);
    for n in 1..=4usize {
        for _ in 0..10 {
            let entries: Vec<Polynomial> = (0..n * n)
                .map(|_| random_poly(&mut rng, &ctx, 2, 1))
                .collect();
            let m = PolyMatrix::new(n, n, entries);
            assert_eq!(m.determinant().unwrap(), permutation_sum_det(&m));
        }
    }
}

// ---------------------------------------------------------------------------
// bernstein functional-equation certificate (criterion 10 cross-check)
// ---------------------------------------------------------------------------

#[test]
fn functional_equation_integer_certificate() {
    for id in ["nc:2", "nc:3", "nc:4"] {
        let entry = fdk_core::catalog::catalog_entry(id).unwrap();
        let h = entry.file.parse_h().unwrap();
        let n = h.context().len();
        let b = fdk_core::bernstein::bernstein_selfdual(&h).unwrap();
        let ctx = WeylContext::new(h.context().names().to_vec(), vec![]);
        let op = WeylOperator::from_polynomial_in_derivations(&h, &ctx, &(0..n).collect::<Vec<_>>());
        for k in 1..=(n as u32 + 2) {
            let lhs = op.apply(&h.pow(k)).unwrap();
            let bk = b.poly.eval(&rat_int(k as i64));
            let rhs = h.pow(k - 1).scale(&bk);
            assert_eq!(lhs, rhs, "{id}, k = {k}");
        }
    }
}

#[test]
fn resonance_constant_is_monotone_in_roots() {
    use fdk_core::bernstein::{resonance_constant, BernsteinPolynomial, Normalization, UniPoly};
    // Perturbing a root downward can only keep or lower c.
    let mk = |roots: &[(i64, i64)]| {
        let mut p = UniPoly::constant(Rat::one());
        for (num, den) in roots {
            p = p.mul(&UniPoly::new(vec![
                -Rat::new(BigInt::from(*num), BigInt::from(*den)),
                Rat::one(),
            ]));
        }
        BernsteinPolynomial::from_poly(p, Normalization::Classical).unwrap()
    };
    let base = mk(&[(-1, 1), (-2, 3)]);
    let lowered = mk(&[(-2, 1), (-2, 3)]);
    let c_base = resonance_constant(&base, 3).unwrap().c;
    let c_low = resonance_constant(&lowered, 3).unwrap().c;
    match (c_base, c_low) {
        (Some(a), Some(b)) => assert!(b <= a),
        (None, _) => {}
        (Some(_), None) => panic!("lowering a root cannot remove resonance"),
    }
}

//! Linear logarithmic vector fields of a divisor: the Lie algebras g_D and
//! a_D, the Saito matrix and Saito's criterion, bracket structure constants,
//! the trace-zero (special) property and the dual fields on the dual space.

use std::sync::Arc;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::polyring::{PolyMatrix, Polynomial, Rat, VarContext};
use crate::weyl::{WeylContext, WeylOperator};

/// Whether the n x n matrix `A` encodes the field `w . A^tr . d_w` on the
/// primal space or `-l . A . d_l` on the dual space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldConvention {
    Primal,
    Dual,
}

/// A vector field with linear-form coefficients, represented faithfully by
/// its matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearField {
    matrix: Vec<Vec<Rat>>,
    convention: FieldConvention,
}

impl LinearField {
    pub fn new(matrix: Vec<Vec<Rat>>, convention: FieldConvention) -> Self {
        let n = matrix.len();
        for row in &matrix {
            assert_eq!(row.len(), n, "matrix must be square");
        }
        LinearField { matrix, convention }
    }

    pub fn identity(n: usize, convention: FieldConvention) -> Self {
        let mut m = vec![vec![Rat::zero(); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Rat::one();
        }
        LinearField::new(m, convention)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.matrix
    }

    pub fn convention(&self) -> FieldConvention {
        self.convention
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| r.iter().all(|c| c.is_zero()))
    }

    pub fn trace(&self) -> Rat {
        (0..self.dim()).map(|i| self.matrix[i][i].clone()).sum()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let m = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|x| x * c).collect())
            .collect();
        LinearField::new(m, self.convention)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        let m = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
            .collect();
        LinearField::new(m, self.convention)
    }

    /// Coefficient of `d_j` as a linear form in the context variables:
    /// `(A w)_j` in the primal convention, `-(A^tr l)_j` in the dual one.
    pub fn coefficient_form(&self, ctx: &Arc<VarContext>, j: usize) -> Polynomial {
        let n = self.dim();
        assert_eq!(ctx.len(), n);
        let mut p = Polynomial::zero(ctx);
        for i in 0..n {
            let c = match self.convention {
                FieldConvention::Primal => self.matrix[j][i].clone(),
                FieldConvention::Dual => -self.matrix[i][j].clone(),
            };
            if !c.is_zero() {
                let mut exp = vec![0u32; n];
                exp[i] = 1;
                p = p.add(&Polynomial::monomial(ctx, exp, c)).expect("ctx");
            }
        }
        p
    }

    /// The field as a first-order Weyl operator; `pair_map[i]` is the pair of
    /// `ctx` carrying the i-th coordinate.
    pub fn as_operator(&self, ctx: &Arc<WeylContext>, pair_map: &[usize]) -> WeylOperator {
        let n = self.dim();
        assert_eq!(pair_map.len(), n);
        let mut op = WeylOperator::zero(ctx);
        for j in 0..n {
            for i in 0..n {
                let c = match self.convention {
                    FieldConvention::Primal => self.matrix[j][i].clone(),
                    FieldConvention::Dual => -self.matrix[i][j].clone(),
                };
                if c.is_zero() {
                    continue;
                }
                let mut pos = vec![0i64; ctx.num_pairs()];
                let mut der = vec![0u32; ctx.num_pairs()];
                pos[pair_map[i]] = 1;
                der[pair_map[j]] = 1;
                op = op
                    .add(&WeylOperator::term(
                        ctx,
                        pos,
                        der,
                        vec![0; ctx.centrals().len()],
                        c,
                    ))
                    .expect("ctx");
            }
        }
        op
    }

    /// Applies the field to a polynomial in matching coordinates.
    pub fn apply_to(&self, p: &Polynomial) -> Polynomial {
        let ctx = p.context();
        let n = self.dim();
        assert_eq!(ctx.len(), n);
        let mut out = Polynomial::zero(ctx);
        for j in 0..n {
            let form = self.coefficient_form(ctx, j);
            if form.is_zero() {
                continue;
            }
            out = out
                .add(&form.multiply(&p.differentiate_index(j)).expect("ctx"))
                .expect("ctx");
        }
        out
    }
}

/// A verified linear free divisor: Saito basis, Euler field, scalars and the
/// special (trace-zero) flag.
#[derive(Debug, Clone)]
pub struct DivisorAnalysis {
    pub n: usize,
    pub h: Polynomial,
    /// Basis of g_D with the scalars `c_i` of `delta_i(h) = c_i h`; the last
    /// element is the Euler field.
    pub gd_basis: Vec<(LinearField, Rat)>,
    /// The `c_i = 0` part of the basis.
    pub ad_basis: Vec<LinearField>,
    pub euler: LinearField,
    pub saito_constant: Rat,
    pub special: bool,
}

impl DivisorAnalysis {
    /// All a_D matrices traceless; a necessary condition for reductivity.
    pub fn is_special(&self) -> bool {
        self.ad_basis.iter().all(|f| f.trace().is_zero())
    }
}

/// Solves `Z_A(h) = c h` over the entries of `A` and the scalar `c`, and
/// returns the solution space split into the `c = 0` part (a_D) and a
/// complement spanned by the Euler field.
pub fn compute_log_algebra(h: &Polynomial) -> Result<(Vec<(LinearField, Rat)>, Vec<LinearField>)> {
    if h.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let deg = h.weighted_degree().ok_or(Error::Inhomogeneous)?;
    let ctx = h.context().clone();
    let n = ctx.len();

    // Unknowns: A[j][i] flattened row-major, then c.
    // Coefficientwise equations of Z_A(h) - c h = 0, where the coefficient of
    // A[j][i] is w_i * d_j h.
    let mut monomials: std::collections::BTreeMap<Vec<u32>, usize> = std::collections::BTreeMap::new();
    let mut columns: Vec<Vec<(Vec<u32>, Rat)>> = Vec::with_capacity(n * n + 1);
    for j in 0..n {
        let dh = h.differentiate_index(j);
        for i in 0..n {
            let mut col = Vec::new();
            for (e, c) in dh.terms() {
                let mut exp = e.clone();
                exp[i] += 1;
                col.push((exp, c.clone()));
            }
            columns.push(col);
        }
    }
    columns.push(h.terms().map(|(e, c)| (e.clone(), -c.clone())).collect());
    for col in &columns {
        for (e, _) in col {
            let next = monomials.len();
            monomials.entry(e.clone()).or_insert(next);
        }
    }
    let mut m = QMatrix::zeros(monomials.len(), n * n + 1);
    for (ci, col) in columns.iter().enumerate() {
        for (e, c) in col {
            let r = monomials[e];
            let v = m.at(r, ci) + c;
            m.set(r, ci, v);
        }
    }
    let kernel = m.kernel_basis();

    // Split off the c = 0 subspace using the first basis vector with c != 0.
    // The kernel basis itself comes from the row-reduced equation system with
    // lexicographic column order, so the resulting a_D basis is canonical.
    let c_idx = n * n;
    let pivot = kernel.iter().find(|v| !v[c_idx].is_zero()).cloned();
    let mut ad_vectors: Vec<Vec<Rat>> = Vec::new();
    for v in &kernel {
        if v[c_idx].is_zero() {
            ad_vectors.push(v[..c_idx].to_vec());
        } else if let Some(p) = &pivot {
            if v != p {
                let f = &v[c_idx] / &p[c_idx];
                let adj: Vec<Rat> = (0..c_idx).map(|k| &v[k] - &f * &p[k]).collect();
                ad_vectors.push(adj);
            }
        }
    }
    let ad_basis: Vec<LinearField> = ad_vectors
        .into_iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .map(|v| vec_to_field(&v, n))
        .collect();

    let mut gd: Vec<(LinearField, Rat)> =
        ad_basis.iter().map(|f| (f.clone(), Rat::zero())).collect();
    if pivot.is_some() {
        // The Euler field is always a valid complement generator for
        // homogeneous h.
        gd.push((
            LinearField::identity(n, FieldConvention::Primal),
            Rat::from_integer(BigInt::from(deg)),
        ));
    }
    Ok((gd, ad_basis))
}

fn vec_to_field(v: &[Rat], n: usize) -> LinearField {
    let mut m = vec![vec![Rat::zero(); n]; n];
    for j in 0..n {
        for i in 0..n {
            m[j][i] = v[j * n + i].clone();
        }
    }
    LinearField::new(m, FieldConvention::Primal)
}

/// Saito's criterion: the determinant of the coefficient matrix of `fields`
/// must be a nonzero rational multiple of squarefree `h`. On success the
/// basis is normalized so that the first `n-1` fields annihilate `h` and the
/// last is the Euler field.
pub fn saito_criterion(h: &Polynomial, fields: &[LinearField]) -> Result<DivisorAnalysis> {
    let ctx = h.context().clone();
    let n = ctx.len();
    if fields.len() != n {
        return Err(Error::BadInput(format!(
            "expected {n} fields, got {}",
            fields.len()
        )));
    }
    if !h.is_squarefree()? {
        return Err(Error::NotSquarefree);
    }
    let deg = h.weighted_degree().ok_or(Error::Inhomogeneous)?;

    // Saito matrix of the fields as given: column i holds the coefficient
    // forms of field i.
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for f in fields {
            entries.push(f.coefficient_form(&ctx, j));
        }
    }
    let det = PolyMatrix::new(n, n, entries).determinant()?;
    let saito_constant = det
        .divide_exact(h)
        .and_then(|q| q.as_constant())
        .filter(|c| !c.is_zero())
        .ok_or(Error::NotProportional)?;

    // Scalars c_i with delta_i(h) = c_i h.
    let mut annihilating: Vec<LinearField> = Vec::new();
    let mut euler_like: Vec<(LinearField, Rat)> = Vec::new();
    for f in fields {
        let image = f.apply_to(h);
        if image.is_zero() {
            annihilating.push(f.clone());
        } else {
            match image.divide_exact(h).and_then(|q| q.as_constant()) {
                Some(c) => euler_like.push((f.clone(), c)),
                None => {
                    return Err(Error::Verification(
                        "a field does not stabilize the fibres of h".into(),
                    ))
                }
            }
        }
    }
    if euler_like.is_empty() {
        return Err(Error::NoEulerComplement);
    }
    // Normalize surplus Euler-like fields into annihilating ones.
    let (base, base_c) = euler_like[0].clone();
    for (f, c) in euler_like.iter().skip(1) {
        annihilating.push(f.sub(&base.scale(&(c / &base_c))));
    }
    if annihilating.len() != n - 1 {
        return Err(Error::NoEulerComplement);
    }
    let euler = LinearField::identity(n, FieldConvention::Primal);
    let special = annihilating.iter().all(|f| f.trace().is_zero());
    let mut gd_basis: Vec<(LinearField, Rat)> = annihilating
        .iter()
        .map(|f| (f.clone(), Rat::zero()))
        .collect();
    gd_basis.push((euler.clone(), Rat::from_integer(BigInt::from(deg))));
    Ok(DivisorAnalysis {
        n,
        h: h.clone(),
        gd_basis,
        ad_basis: annihilating,
        euler,
        saito_constant,
        special,
    })
}

/// Rational structure constants of the g_D basis: `[delta_i, delta_j] =
/// sum_k c[i][j][k] delta_k`.
#[derive(Debug, Clone)]
pub struct BracketTable {
    pub dim: usize,
    pub constants: Vec<Vec<Vec<Rat>>>,
}

/// Expresses all pairwise brackets in the g_D basis. Matrix commutators are
/// cross-checked against operator commutators, pinning the sign convention
/// `[Z_A, Z_B] = Z_{[B,A]}`.
pub fn bracket_in_basis(analysis: &DivisorAnalysis) -> Result<BracketTable> {
    let n = analysis.n;
    let basis: Vec<&LinearField> = analysis.gd_basis.iter().map(|(f, _)| f).collect();
    let m = basis.len();

    // Solve for coordinates in the span of the basis matrices.
    let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for f in &basis {
        let mut flat = Vec::with_capacity(n * n);
        for row in f.matrix() {
            flat.extend(row.iter().cloned());
        }
        cols.push(flat);
    }
    let mut sys = QMatrix::zeros(n * n, m);
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            sys.set(r, c, v.clone());
        }
    }

    let wctx = WeylContext::new(analysis.h.context().names().to_vec(), vec![]);
    let pair_map: Vec<usize> = (0..n).collect();
    let ops: Vec<WeylOperator> = basis.iter().map(|f| f.as_operator(&wctx, &pair_map)).collect();

    let mut constants = vec![vec![vec![Rat::zero(); m]; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            // [Z_A, Z_B] = Z_{BA - AB}
            let a = basis[i].matrix();
            let b = basis[j].matrix();
            let mut comm = vec![vec![Rat::zero(); n]; n];
            for r in 0..n {
                for c in 0..n {
                    let mut v = Rat::zero();
                    for k in 0..n {
                        v += &b[r][k] * &a[k][c] - &a[r][k] * &b[k][c];
                    }
                    comm[r][c] = v;
                }
            }
            let comm_field = LinearField::new(comm.clone(), FieldConvention::Primal);
            let op_comm = ops[i].commutator(&ops[j])?;
            if comm_field.as_operator(&wctx, &pair_map) != op_comm {
                return Err(Error::Verification(
                    "matrix bracket disagrees with operator commutator".into(),
                ));
            }
            let mut flat = Vec::with_capacity(n * n);
            for row in &comm {
                flat.extend(row.iter().cloned());
            }
            let coords = sys.solve(&flat).ok_or(Error::BracketNotClosed)?;
            for k in 0..m {
                constants[i][j][k] = coords[k].clone();
                constants[j][i][k] = -coords[k].clone();
            }
        }
    }
    Ok(BracketTable { dim: m, constants })
}

/// The dual equation and the dual log fields on the dual space.
#[derive(Debug, Clone)]
pub struct DualData {
    pub context: Arc<VarContext>,
    pub h_dual: Polynomial,
    pub dual_fields: Vec<LinearField>,
}

/// Builds `h_dual` by the positional substitution `w_i -> l_i` and the dual
/// fields `-l . A . d` for each a_D basis element, verifying that each one
/// annihilates `h_dual`. Inputs must be in self-dual coordinates; failures
/// are flagged rather than repaired.
pub fn dualize(analysis: &DivisorAnalysis) -> Result<DualData> {
    if !analysis.special {
        return Err(Error::BadInput(
            "dualize requires the special (trace-zero) property".into(),
        ));
    }
    let n = analysis.n;
    let dual_ctx = VarContext::new((1..=n).map(|i| format!("l{i}")).collect::<Vec<_>>());
    let id_map: Vec<usize> = (0..n).collect();
    let h_dual = analysis.h.map_variables(&dual_ctx, &id_map);
    let mut dual_fields = Vec::with_capacity(analysis.ad_basis.len());
    for f in &analysis.ad_basis {
        let dual = LinearField::new(f.matrix().to_vec(), FieldConvention::Dual);
        if !dual.apply_to(&h_dual).is_zero() {
            return Err(Error::Verification(
                "dual field does not annihilate h_dual: coordinates are not self-dual".into(),
            ));
        }
        dual_fields.push(dual);
    }
    Ok(DualData { context: dual_ctx, h_dual, dual_fields })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::rat_int;

    fn normal_crossing(n: usize) -> Polynomial {
        let ctx = VarContext::new((1..=n).map(|i| format!("w{i}")).collect::<Vec<_>>());
        let mut h = Polynomial::one(&ctx);
        for i in 1..=n {
            h = h
                .multiply(&Polynomial::variable(&ctx, &format!("w{i}")).unwrap())
                .unwrap();
        }
        h
    }

    #[test]
    fn log_algebra_normal_crossing_n2() {
        let h = normal_crossing(2);
        let (gd, ad) = compute_log_algebra(&h).unwrap();
        assert_eq!(gd.len(), 2);
        assert_eq!(ad.len(), 1);
        // The a_D field annihilates h and is a combination of w1 d1, w2 d2.
        assert!(ad[0].apply_to(&h).is_zero());
        for (f, c) in &gd {
            let img = f.apply_to(&h);
            assert_eq!(img, h.scale(c));
        }
    }

    #[test]
    fn log_algebra_n1() {
        let ctx = VarContext::new(vec!["w"]);
        let h = Polynomial::variable(&ctx, "w").unwrap();
        let (gd, ad) = compute_log_algebra(&h).unwrap();
        assert_eq!(gd.len(), 1);
        assert!(ad.is_empty());
    }

    #[test]
    fn log_algebra_non_linear_free_divisor() {
        // h = w1 w2 (w1 + w2): a free divisor that is not linear free; only
        // the Euler field survives at the linear level.
        let ctx = VarContext::new(vec!["w1", "w2"]);
        let w1 = Polynomial::variable(&ctx, "w1").unwrap();
        let w2 = Polynomial::variable(&ctx, "w2").unwrap();
        let h = w1
            .multiply(&w2)
            .unwrap()
            .multiply(&w1.add(&w2).unwrap())
            .unwrap();
        let (gd, ad) = compute_log_algebra(&h).unwrap();
        assert_eq!(gd.len(), 1);
        assert!(ad.is_empty());
    }

    #[test]
    fn saito_normal_crossing() {
        for n in 1..=4 {
            let h = normal_crossing(n);
            let (gd, _) = compute_log_algebra(&h).unwrap();
            let fields: Vec<LinearField> = gd.into_iter().map(|(f, _)| f).collect();
            let analysis = saito_criterion(&h, &fields).unwrap();
            assert!(!analysis.saito_constant.is_zero());
            assert_eq!(analysis.ad_basis.len(), n - 1);
            assert!(analysis.special);
        }
    }

    #[test]
    fn saito_diagonal_basis_has_constant_one() {
        // The diagonal Saito matrix of the normal crossing divisor gives
        // det = h exactly.
        let n = 3;
        let h = normal_crossing(n);
        let fields: Vec<LinearField> = (0..n)
            .map(|i| {
                let mut m = vec![vec![Rat::zero(); n]; n];
                m[i][i] = Rat::one();
                LinearField::new(m, FieldConvention::Primal)
            })
            .collect();
        let analysis = saito_criterion(&h, &fields).unwrap();
        assert_eq!(analysis.saito_constant, rat_int(1));
    }

    #[test]
    fn saito_rejects_non_squarefree() {
        let ctx = VarContext::new(vec!["w1", "w2"]);
        let w1 = Polynomial::variable(&ctx, "w1").unwrap();
        let w2 = Polynomial::variable(&ctx, "w2").unwrap();
        let h = w1.pow(2).multiply(&w2).unwrap();
        let fields = vec![
            LinearField::identity(2, FieldConvention::Primal),
            LinearField::identity(2, FieldConvention::Primal),
        ];
        assert!(matches!(saito_criterion(&h, &fields), Err(Error::NotSquarefree)));
    }

    #[test]
    fn brackets_vanish_for_normal_crossing() {
        let h = normal_crossing(3);
        let (gd, _) = compute_log_algebra(&h).unwrap();
        let fields: Vec<LinearField> = gd.into_iter().map(|(f, _)| f).collect();
        let analysis = saito_criterion(&h, &fields).unwrap();
        let table = bracket_in_basis(&analysis).unwrap();
        for i in 0..table.dim {
            for j in 0..table.dim {
                for k in 0..table.dim {
                    assert!(table.constants[i][j][k].is_zero());
                }
            }
        }
    }

    #[test]
    fn dualize_normal_crossing_n2() {
        let h = normal_crossing(2);
        let (gd, _) = compute_log_algebra(&h).unwrap();
        let fields: Vec<LinearField> = gd.into_iter().map(|(f, _)| f).collect();
        let analysis = saito_criterion(&h, &fields).unwrap();
        let dual = dualize(&analysis).unwrap();
        assert_eq!(dual.dual_fields.len(), 1);
        for f in &dual.dual_fields {
            assert!(f.apply_to(&dual.h_dual).is_zero());
        }
    }

    #[test]
    fn dualize_n1_is_empty() {
        let ctx = VarContext::new(vec!["w"]);
        let h = Polynomial::variable(&ctx, "w").unwrap();
        let (gd, _) = compute_log_algebra(&h).unwrap();
        let fields: Vec<LinearField> = gd.into_iter().map(|(f, _)| f).collect();
        let analysis = saito_criterion(&h, &fields).unwrap();
        let dual = dualize(&analysis).unwrap();
        assert!(dual.dual_fields.is_empty());
    }
}

//! The constructive bijections between nilpotent pairs with marked vectors
//! and unrestricted pairs of linear maps:
//!
//! * balanced triples (f, g, v) ↔ arbitrary pairs (f′, g′), both ways;
//! * ρ and ρ′ exchanging balanced-balanced and unbalanced-unbalanced
//!   quadruples;
//! * the split of balanced-balanced quadruples into the disjoint union of
//!   unbalanced-unbalanced quadruples and W-side balanced triples;
//! * the master bijection
//!   Hom(V,W) × Hom(W,V) × (V ∪₀ W) ≅ 𝒩(V,W) × V × W.
//!
//! Everything is exact and deterministic: complements always come from
//! `canonical_complement`, and ordered bases are anchored at canonical RREF
//! bases, so forwards and inverses are mutually inverse on the nose.

use thiserror::Error;

use crate::field::{Fel, Field};
use crate::linalg::{
    classify_vector, fitting_decompose, map_from_basis_images, orbit_basis, orbit_subspace,
    split_along, vec_is_zero, LinalgError, LinearPair, MatrixFq, Side, Subspace,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BijectionError {
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
    #[error("invalid quadruple: {0}")]
    InvalidQuadruple(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("the marked balanced vector must be nonzero")]
    ZeroBalancedVector,
    #[error("flavor mismatch: {0}")]
    FlavorMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn check_vector(field: &Field, dim: usize, v: &[Fel], what: &str) -> Result<(), String> {
    if v.len() != dim {
        return Err(format!("{what} has length {}, expected {dim}", v.len()));
    }
    if v.iter().any(|e| e.index() as u64 >= field.q()) {
        return Err(format!("{what} has entries outside the field"));
    }
    Ok(())
}

/// A nilpotent pair together with a marked balanced vector v ∈ V. The zero
/// vector is balanced, so every nilpotent pair admits at least one triple.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BalancedTriple {
    pair: LinearPair,
    v: Vec<Fel>,
    ell: usize,
}

impl BalancedTriple {
    pub fn new(pair: LinearPair, v: Vec<Fel>) -> Result<BalancedTriple, BijectionError> {
        check_vector(pair.field(), pair.m(), &v, "the marked vector")
            .map_err(BijectionError::InvalidTriple)?;
        if !pair.is_nilpotent() {
            return Err(BijectionError::InvalidTriple("the pair is not nilpotent".into()));
        }
        let c = classify_vector(&pair, &v, Side::V)?;
        if !c.is_balanced() {
            return Err(BijectionError::InvalidTriple(format!(
                "the marked vector is unbalanced (orbit dimensions {} and {})",
                c.a, c.ell
            )));
        }
        Ok(BalancedTriple {
            pair,
            v,
            ell: c.length(),
        })
    }

    pub fn pair(&self) -> &LinearPair {
        &self.pair
    }

    pub fn v(&self) -> &[Fel] {
        &self.v
    }

    /// The common orbit length ℓ = dim T[v] = dim T′[fv].
    pub fn length(&self) -> usize {
        self.ell
    }
}

/// The two quadruple flavors: both marked vectors balanced, or both
/// unbalanced. Mixed flavors are not quadruples.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Flavor {
    BalancedBalanced,
    UnbalancedUnbalanced,
}

/// A nilpotent pair with marked vectors v ∈ V and w ∈ W of equal flavor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quadruple {
    pair: LinearPair,
    v: Vec<Fel>,
    w: Vec<Fel>,
    flavor: Flavor,
}

impl Quadruple {
    pub fn new(pair: LinearPair, v: Vec<Fel>, w: Vec<Fel>) -> Result<Quadruple, BijectionError> {
        check_vector(pair.field(), pair.m(), &v, "the V-side vector")
            .map_err(BijectionError::InvalidQuadruple)?;
        check_vector(pair.field(), pair.n(), &w, "the W-side vector")
            .map_err(BijectionError::InvalidQuadruple)?;
        if !pair.is_nilpotent() {
            return Err(BijectionError::InvalidQuadruple("the pair is not nilpotent".into()));
        }
        let cv = classify_vector(&pair, &v, Side::V)?;
        let cw = classify_vector(&pair, &w, Side::W)?;
        let flavor = match (cv.is_balanced(), cw.is_balanced()) {
            (true, true) => Flavor::BalancedBalanced,
            (false, false) => Flavor::UnbalancedUnbalanced,
            (vb, _) => {
                let (side_b, side_u) = if vb { ("v", "w") } else { ("w", "v") };
                return Err(BijectionError::FlavorMismatch(format!(
                    "{side_b} is balanced but {side_u} is unbalanced"
                )));
            }
        };
        Ok(Quadruple { pair, v, w, flavor })
    }

    pub fn pair(&self) -> &LinearPair {
        &self.pair
    }

    pub fn v(&self) -> &[Fel] {
        &self.v
    }

    pub fn w(&self) -> &[Fel] {
        &self.w
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }
}

/// A vector of V ∪₀ W. The two copies share their zero, which is always
/// stored on the W side; `MasterElement::maps` normalizes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TaggedVector {
    V(Vec<Fel>),
    W(Vec<Fel>),
}

/// One element of either side of the master bijection: an arbitrary pair of
/// maps with a tagged vector, or a nilpotent pair with free vectors v, w.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MasterElement {
    Maps {
        f: MatrixFq,
        g: MatrixFq,
        tagged: TaggedVector,
    },
    Nilpotent {
        pair: LinearPair,
        v: Vec<Fel>,
        w: Vec<Fel>,
    },
}

impl MasterElement {
    pub fn maps(f: MatrixFq, g: MatrixFq, tagged: TaggedVector) -> Result<MasterElement, BijectionError> {
        let probe = LinearPair::new(f.clone(), g.clone())?;
        let (m, n) = (probe.m(), probe.n());
        let tagged = match tagged {
            TaggedVector::V(v) => {
                check_vector(probe.field(), m, &v, "the V-tagged vector")
                    .map_err(BijectionError::InvalidElement)?;
                if vec_is_zero(&v) {
                    TaggedVector::W(vec![Fel::ZERO; n])
                } else {
                    TaggedVector::V(v)
                }
            }
            TaggedVector::W(w) => {
                check_vector(probe.field(), n, &w, "the W-tagged vector")
                    .map_err(BijectionError::InvalidElement)?;
                TaggedVector::W(w)
            }
        };
        Ok(MasterElement::Maps { f, g, tagged })
    }

    pub fn nilpotent(pair: LinearPair, v: Vec<Fel>, w: Vec<Fel>) -> Result<MasterElement, BijectionError> {
        check_vector(pair.field(), pair.m(), &v, "the V-side vector")
            .map_err(BijectionError::InvalidElement)?;
        check_vector(pair.field(), pair.n(), &w, "the W-side vector")
            .map_err(BijectionError::InvalidElement)?;
        if !pair.is_nilpotent() {
            return Err(BijectionError::InvalidElement("the pair is not nilpotent".into()));
        }
        Ok(MasterElement::Nilpotent { pair, v, w })
    }
}

fn add_vecs(field: &Field, a: &[Fel], b: &[Fel]) -> Vec<Fel> {
    a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect()
}

fn sub_vecs(field: &Field, a: &[Fel], b: &[Fel]) -> Vec<Fel> {
    a.iter().zip(b).map(|(&x, &y)| field.sub(x, y)).collect()
}

/// Σ coeffs[i] · vecs[i] in GF(q)^dim.
fn combo(field: &Field, coeffs: &[Fel], vecs: &[Vec<Fel>], dim: usize) -> Vec<Fel> {
    let mut out = vec![Fel::ZERO; dim];
    for (&c, v) in coeffs.iter().zip(vecs) {
        for (slot, &e) in out.iter_mut().zip(v) {
            *slot = field.add(*slot, field.mul(c, e));
        }
    }
    out
}

/// Coordinates of v in an arbitrary independent spanning set.
fn coords_in_basis(field: &Field, basis: &[Vec<Fel>], v: &[Fel]) -> Vec<Fel> {
    MatrixFq::from_columns(field.clone(), v.len(), basis)
        .solve(v)
        .expect("vector lies in the span of the basis")
}

/// The triple → pair direction: dissolve the normal form carried by the
/// orbit bases x_i = Tⁱ⁻¹v and y_i = T′ⁱ⁻¹(fv) into an arbitrary pair whose
/// Fitting-invertible action encodes those bases.
///
/// With U_V = ⟨x⟩, U_W = ⟨y⟩ and canonical complements P_V, P_W, write
/// f(u) = A(u) ⊕ N₁(u) and g(t) = B(t) ⊕ N₂(t) on the complements. The
/// output maps are: S₁ on U_V, S₂ on U_W (the isomorphisms anchored by the
/// canonical bases r, s: S₁r_i = y_i, S₂s_i = x_i), with the nilpotent
/// remainder transported onto the graph complements of S₂A and S₁B.
pub fn leinster_forward(t: &BalancedTriple) -> (MatrixFq, MatrixFq) {
    let pair = &t.pair;
    let field = pair.field().clone();
    let (m, n) = (pair.m(), pair.n());
    if t.ell == 0 {
        // Empty invertible part: the pair passes through unchanged.
        return (pair.f().clone(), pair.g().clone());
    }
    let xs = orbit_basis(pair, &t.v, Side::V).expect("orbit of a validated triple");
    let fv = pair.apply_f(&t.v);
    let ys = orbit_basis(pair, &fv, Side::W).expect("image orbit of a validated triple");
    debug_assert_eq!(xs.len(), t.ell);
    debug_assert_eq!(ys.len(), t.ell);
    let u_v = Subspace::from_rows(&field, m, &xs);
    let u_w = Subspace::from_rows(&field, n, &ys);
    let p_v = u_v.canonical_complement();
    let p_w = u_w.canonical_complement();
    let s1 = |h: &[Fel]| combo(&field, &u_v.express(h).expect("h in U_V"), &ys, n);
    let s2 = |h: &[Fel]| combo(&field, &u_w.express(h).expect("h in U_W"), &xs, m);

    let mut basis_v: Vec<Vec<Fel>> = u_v.basis_rows().map(|r| r.to_vec()).collect();
    let mut images_f: Vec<Vec<Fel>> = ys.clone();
    for u in p_v.basis_rows() {
        let (a_u, n1_u) = split_along(&pair.apply_f(u), &u_w, &p_w).expect("W = U_W ⊕ P_W");
        let (b_n1, _) = split_along(&pair.apply_g(&n1_u), &u_v, &p_v).expect("V = U_V ⊕ P_V");
        basis_v.push(add_vecs(&field, u, &s2(&a_u)));
        images_f.push(add_vecs(&field, &n1_u, &s1(&b_n1)));
    }
    let fp = map_from_basis_images(&field, m, n, &basis_v, &images_f)
        .expect("canonical basis with graph complement spans V");

    let mut basis_w: Vec<Vec<Fel>> = u_w.basis_rows().map(|s| s.to_vec()).collect();
    let mut images_g: Vec<Vec<Fel>> = xs.clone();
    for tw in p_w.basis_rows() {
        let (b_t, n2_t) = split_along(&pair.apply_g(tw), &u_v, &p_v).expect("V = U_V ⊕ P_V");
        let (a_n2, _) = split_along(&pair.apply_f(&n2_t), &u_w, &p_w).expect("W = U_W ⊕ P_W");
        basis_w.push(add_vecs(&field, tw, &s1(&b_t)));
        images_g.push(add_vecs(&field, &n2_t, &s2(&a_n2)));
    }
    let gp = map_from_basis_images(&field, n, m, &basis_w, &images_g)
        .expect("canonical basis with graph complement spans W");
    (fp, gp)
}

/// The pair → triple direction; total. Fitting-decompose, read the ordered
/// bases back out of the invertible action (x_i = g′s_i, y_i = f′r_i),
/// recover the blocks from the graph complements, and reassemble the normal
/// form with v = x₁.
pub fn leinster_inverse(fp: &MatrixFq, gp: &MatrixFq) -> Result<BalancedTriple, BijectionError> {
    let pair = LinearPair::new(fp.clone(), gp.clone())?;
    let field = pair.field().clone();
    let (m, n) = (pair.m(), pair.n());
    let fit = fitting_decompose(&pair);
    let ell = fit.v_inv.dim();
    debug_assert_eq!(ell, fit.w_inv.dim());
    if ell == 0 {
        return Ok(BalancedTriple::new(pair, vec![Fel::ZERO; m])
            .expect("a fully nilpotent pair with v = 0 is a balanced triple"));
    }
    let rs: Vec<Vec<Fel>> = fit.v_inv.basis_rows().map(|r| r.to_vec()).collect();
    let ss: Vec<Vec<Fel>> = fit.w_inv.basis_rows().map(|s| s.to_vec()).collect();
    let xs: Vec<Vec<Fel>> = ss.iter().map(|s| pair.apply_g(s)).collect();
    let ys: Vec<Vec<Fel>> = rs.iter().map(|r| pair.apply_f(r)).collect();
    let p_v = fit.v_inv.canonical_complement();
    let p_w = fit.w_inv.canonical_complement();

    let mut basis_v: Vec<Vec<Fel>> = xs.clone();
    let mut images_f: Vec<Vec<Fel>> = ys.clone();
    for u in p_v.basis_rows() {
        // The Fitting complement is a graph over P_V: z_u = u + h_V(u).
        let (z_u, _) = split_along(u, &fit.v_nil, &fit.v_inv).expect("V = V_N ⊕ V_I");
        let h_u = sub_vecs(&field, &z_u, u);
        let gamma = coords_in_basis(&field, &xs, &h_u);
        let a_u = combo(&field, &gamma, &ss, n);
        let (_, n1_u) = split_along(&pair.apply_f(&z_u), &fit.w_inv, &p_w).expect("W = W_I ⊕ P_W");
        basis_v.push(u.to_vec());
        images_f.push(add_vecs(&field, &a_u, &n1_u));
    }
    let f = map_from_basis_images(&field, m, n, &basis_v, &images_f)
        .expect("decoded basis with complement spans V");

    let mut basis_w: Vec<Vec<Fel>> = ys.clone();
    let mut images_g: Vec<Vec<Fel>> = xs[1..].to_vec();
    images_g.push(vec![Fel::ZERO; m]);
    for tw in p_w.basis_rows() {
        let (z_t, _) = split_along(tw, &fit.w_nil, &fit.w_inv).expect("W = W_N ⊕ W_I");
        let h_t = sub_vecs(&field, &z_t, tw);
        let delta = coords_in_basis(&field, &ys, &h_t);
        let b_t = combo(&field, &delta, &rs, m);
        let (_, n2_t) = split_along(&pair.apply_g(&z_t), &fit.v_inv, &p_v).expect("V = V_I ⊕ P_V");
        basis_w.push(tw.to_vec());
        images_g.push(add_vecs(&field, &b_t, &n2_t));
    }
    let g = map_from_basis_images(&field, n, m, &basis_w, &images_g)
        .expect("decoded basis with complement spans W");
    let out = LinearPair::new(f, g).expect("shapes preserved");
    let v = xs[0].clone();
    Ok(BalancedTriple::new(out, v).expect("the decoded triple is balanced"))
}

/// W-side variant of [`leinster_forward`]: a balanced w ∈ W dissolves through
/// the swapped orientation.
fn leinster_forward_w(pair: &LinearPair, w: &[Fel]) -> (MatrixFq, MatrixFq) {
    let t = BalancedTriple::new(pair.swap(), w.to_vec()).expect("w is balanced on the W side");
    let (ft, gt) = leinster_forward(&t);
    (gt, ft)
}

/// W-side variant of [`leinster_inverse`]: returns the pair in the original
/// orientation together with its balanced marked vector in W.
fn leinster_inverse_w(
    fp: &MatrixFq,
    gp: &MatrixFq,
) -> Result<(LinearPair, Vec<Fel>), BijectionError> {
    let t = leinster_inverse(gp, fp)?;
    Ok((t.pair.swap(), t.v))
}

/// Shared core of ρ and ρ′: rebuild f so that it keeps its values on the
/// hyperplane V′ = ⊥(T[v] + T[gw]) + T·T[v] + T[gw] and sends the marked
/// vector to w instead. Returns the new pair and the old image f(v).
fn redefine_marked_image(pair: &LinearPair, v: &[Fel], w: &[Fel]) -> (LinearPair, Vec<Fel>) {
    let field = pair.field().clone();
    let (m, n) = (pair.m(), pair.n());
    let t_v = orbit_subspace(pair, v, Side::V).expect("orbit of the marked vector");
    let gw = pair.apply_g(w);
    let t_gw = orbit_subspace(pair, &gw, Side::V).expect("orbit of g(w)");
    let vpp = t_v.sum(&t_gw).canonical_complement();
    let t_mat = pair.t();
    let shifted: Vec<Vec<Fel>> = t_v.basis_rows().map(|b| t_mat.apply(b)).collect();
    let t_t_v = Subspace::from_rows(&field, m, &shifted);
    let vp = vpp.sum(&t_t_v).sum(&t_gw);
    assert_eq!(vp.dim(), m - 1, "the untouched subspace must be a hyperplane");
    assert!(!vp.contains(v), "the marked vector must lie off the hyperplane");
    let mut basis: Vec<Vec<Fel>> = vp.basis_rows().map(|b| b.to_vec()).collect();
    let mut images: Vec<Vec<Fel>> = basis.iter().map(|b| pair.apply_f(b)).collect();
    basis.push(v.to_vec());
    images.push(w.to_vec());
    let f_new =
        map_from_basis_images(&field, m, n, &basis, &images).expect("hyperplane plus v spans V");
    let old = pair.apply_f(v);
    let out = LinearPair::new(f_new, pair.g().clone()).expect("shapes preserved");
    (out, old)
}

/// (f, g, v_b, w_b) ↦ (f′, g, v, fv): redirect f at the nonzero balanced v
/// to hit w, exposing the old image as the new unbalanced W-vector. Only f
/// changes; g is preserved exactly.
pub fn rho(quad: &Quadruple) -> Result<Quadruple, BijectionError> {
    if quad.flavor != Flavor::BalancedBalanced {
        return Err(BijectionError::FlavorMismatch(
            "rho needs a balanced-balanced quadruple".into(),
        ));
    }
    if vec_is_zero(&quad.v) {
        return Err(BijectionError::ZeroBalancedVector);
    }
    let (pair, old_fv) = redefine_marked_image(&quad.pair, &quad.v, &quad.w);
    assert_eq!(pair.g(), quad.pair.g(), "rho leaves g untouched");
    let out = Quadruple::new(pair, quad.v.clone(), old_fv).expect("rho lands in quadruples");
    assert_eq!(
        out.flavor,
        Flavor::UnbalancedUnbalanced,
        "rho outputs are unbalanced-unbalanced"
    );
    Ok(out)
}

/// Inverse of [`rho`]: the same redirection applied to an
/// unbalanced-unbalanced quadruple restores the balanced-balanced one.
pub fn rho_prime(quad: &Quadruple) -> Result<Quadruple, BijectionError> {
    if quad.flavor != Flavor::UnbalancedUnbalanced {
        return Err(BijectionError::FlavorMismatch(
            "rho_prime needs an unbalanced-unbalanced quadruple".into(),
        ));
    }
    debug_assert!(!vec_is_zero(&quad.v), "unbalanced vectors are nonzero");
    let (pair, old_fv) = redefine_marked_image(&quad.pair, &quad.v, &quad.w);
    assert_eq!(pair.g(), quad.pair.g(), "rho_prime leaves g untouched");
    let out = Quadruple::new(pair, quad.v.clone(), old_fv).expect("rho_prime lands in quadruples");
    assert_eq!(
        out.flavor,
        Flavor::BalancedBalanced,
        "rho_prime outputs are balanced-balanced"
    );
    Ok(out)
}

/// Image of [`quadruple_split`]: an unbalanced-unbalanced quadruple (from
/// v ≠ 0) or a balanced triple on the W side, carried by the swapped pair
/// (from v = 0).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SplitResult {
    Unbalanced(Quadruple),
    TripleInW(BalancedTriple),
}

/// Balanced-balanced quadruples split along v = 0: the nonzero ones pass
/// through ρ, the rest drop v and keep the balanced w.
pub fn quadruple_split(quad: &Quadruple) -> Result<SplitResult, BijectionError> {
    if quad.flavor != Flavor::BalancedBalanced {
        return Err(BijectionError::FlavorMismatch(
            "quadruple_split needs a balanced-balanced quadruple".into(),
        ));
    }
    if vec_is_zero(&quad.v) {
        let t = BalancedTriple::new(quad.pair.swap(), quad.w.clone())
            .expect("w is balanced on the W side");
        Ok(SplitResult::TripleInW(t))
    } else {
        Ok(SplitResult::Unbalanced(rho(quad)?))
    }
}

/// Inverse of [`quadruple_split`].
pub fn quadruple_unsplit(split: &SplitResult) -> Result<Quadruple, BijectionError> {
    match split {
        SplitResult::Unbalanced(uu) => rho_prime(uu),
        SplitResult::TripleInW(t) => {
            let pair = t.pair.swap();
            let m = pair.m();
            Quadruple::new(pair, vec![Fel::ZERO; m], t.v.clone())
        }
    }
}

/// Left → right of the master bijection: a W-tagged vector rides along the
/// V-side triple decoding; a (necessarily nonzero) V-tagged vector rides
/// along the W-side decoding, passing through ρ when it decodes balanced.
pub fn master_forward(e: &MasterElement) -> Result<MasterElement, BijectionError> {
    let MasterElement::Maps { f, g, tagged } = e else {
        return Err(BijectionError::InvalidElement(
            "master_forward expects the maps side".into(),
        ));
    };
    match tagged {
        TaggedVector::W(w) => {
            let t = leinster_inverse(f, g)?;
            MasterElement::nilpotent(t.pair.clone(), t.v.clone(), w.clone())
        }
        TaggedVector::V(v) => {
            debug_assert!(!vec_is_zero(v), "the shared zero is stored on the W side");
            let (pair, w_b) = leinster_inverse_w(f, g)?;
            let c = classify_vector(&pair, v, Side::V)?;
            if c.is_balanced() {
                // This V-tag came from the doubly-unbalanced branch; undo ρ′.
                let quad = Quadruple::new(pair, v.clone(), w_b)?;
                let out = rho(&quad)?;
                MasterElement::nilpotent(out.pair, out.v, out.w)
            } else {
                MasterElement::nilpotent(pair, v.clone(), w_b)
            }
        }
    }
}

/// Right → left of the master bijection.
pub fn master_inverse(e: &MasterElement) -> Result<MasterElement, BijectionError> {
    let MasterElement::Nilpotent { pair, v, w } = e else {
        return Err(BijectionError::InvalidElement(
            "master_inverse expects the nilpotent side".into(),
        ));
    };
    let cv = classify_vector(pair, v, Side::V)?;
    let (mut fp, mut gp, mut tagged) = if cv.is_balanced() {
        let t = BalancedTriple::new(pair.clone(), v.clone())?;
        let (fp, gp) = leinster_forward(&t);
        (fp, gp, TaggedVector::W(w.clone()))
    } else {
        let cw = classify_vector(pair, w, Side::W)?;
        if cw.is_balanced() {
            let (fp, gp) = leinster_forward_w(pair, w);
            (fp, gp, TaggedVector::V(v.clone()))
        } else {
            let quad = Quadruple::new(pair.clone(), v.clone(), w.clone())?;
            let bb = rho_prime(&quad)?;
            let (fp, gp) = leinster_forward_w(&bb.pair, &bb.w);
            (fp, gp, TaggedVector::V(v.clone()))
        }
    };
    // Excision of the removed copy [f,g] × {V-tag 0}: the glued bijection
    // never lands there, because V-tags only carry unbalanced (hence
    // nonzero) vectors. If it ever did, one pull through the W-side chain
    // maps the copy to itself, so iterate under a hard bound instead of
    // spinning forever.
    let bound = (pair.field().q() as u128)
        .checked_pow(2 * (pair.m() * pair.n()) as u32)
        .unwrap_or(u128::MAX);
    let mut hops: u128 = 0;
    while matches!(&tagged, TaggedVector::V(vv) if vec_is_zero(vv)) {
        hops += 1;
        assert!(hops <= bound, "master bijection excision failed to terminate");
        let (pair_w, w_b) = leinster_inverse_w(&fp, &gp)?;
        let (fp2, gp2) = leinster_forward_w(&pair_w, &w_b);
        fp = fp2;
        gp = gp2;
        tagged = TaggedVector::V(vec![Fel::ZERO; pair.m()]);
    }
    MasterElement::maps(fp, gp, tagged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{enumerate_matrices, enumerate_vectors};
    use std::collections::HashSet;

    fn f2() -> Field {
        Field::gf(2).unwrap()
    }

    fn mat(field: &Field, rows: usize, cols: usize, idx: &[u64]) -> MatrixFq {
        MatrixFq::from_indices(field, rows, cols, idx).unwrap()
    }

    fn pair11(field: &Field, f: u64, g: u64) -> LinearPair {
        LinearPair::new(mat(field, 1, 1, &[f]), mat(field, 1, 1, &[g])).unwrap()
    }

    fn nilpotent_pairs(field: &Field, m: usize, n: usize) -> Vec<LinearPair> {
        let mut out = Vec::new();
        for f in enumerate_matrices(field, n, m) {
            for g in enumerate_matrices(field, m, n) {
                let p = LinearPair::new(f.clone(), g).unwrap();
                if p.is_nilpotent() {
                    out.push(p);
                }
            }
        }
        out
    }

    #[test]
    fn triple_construction() {
        let k = f2();
        // (f=1, g=0) is nilpotent; v = 1 is balanced for it.
        let t = BalancedTriple::new(pair11(&k, 1, 0), vec![Fel::ONE]).unwrap();
        assert_eq!(t.length(), 1);
        // (f=1, g=1) is not nilpotent.
        assert!(matches!(
            BalancedTriple::new(pair11(&k, 1, 1), vec![Fel::ZERO]).unwrap_err(),
            BijectionError::InvalidTriple(_)
        ));
        // v = 1 is unbalanced for (f=0, g=1).
        assert!(matches!(
            BalancedTriple::new(pair11(&k, 0, 1), vec![Fel::ONE]).unwrap_err(),
            BijectionError::InvalidTriple(_)
        ));
        assert!(matches!(
            BalancedTriple::new(pair11(&k, 0, 0), vec![Fel::ZERO, Fel::ZERO]).unwrap_err(),
            BijectionError::InvalidTriple(_)
        ));
    }

    #[test]
    fn quadruple_construction() {
        let k = f2();
        let bb = Quadruple::new(pair11(&k, 1, 0), vec![Fel::ONE], vec![Fel::ZERO]).unwrap();
        assert_eq!(bb.flavor(), Flavor::BalancedBalanced);
        let uu = Quadruple::new(pair11(&k, 0, 0), vec![Fel::ONE], vec![Fel::ONE]).unwrap();
        assert_eq!(uu.flavor(), Flavor::UnbalancedUnbalanced);
        // For (f=1, g=0): v=1 is balanced but w=1 is unbalanced — mixed.
        assert!(matches!(
            Quadruple::new(pair11(&k, 1, 0), vec![Fel::ONE], vec![Fel::ONE]).unwrap_err(),
            BijectionError::FlavorMismatch(_)
        ));
        assert!(matches!(
            Quadruple::new(pair11(&k, 1, 1), vec![Fel::ZERO], vec![Fel::ZERO]).unwrap_err(),
            BijectionError::InvalidQuadruple(_)
        ));
    }

    /// The full forward table at m = n = 1, q = 2: four balanced triples
    /// onto the four pairs of maps.
    #[test]
    fn leinster_forward_hand_table() {
        let k = f2();
        let cases = [
            ((0u64, 0u64, 0u64), (0u64, 0u64)),
            ((1, 0, 0), (1, 0)),
            ((0, 1, 0), (0, 1)),
            ((1, 0, 1), (1, 1)),
        ];
        for ((f, g, v), (fp_want, gp_want)) in cases {
            let t = BalancedTriple::new(pair11(&k, f, g), vec![k.fel(v).unwrap()]).unwrap();
            let (fp, gp) = leinster_forward(&t);
            assert_eq!(fp, mat(&k, 1, 1, &[fp_want]), "f' for ({f},{g},{v})");
            assert_eq!(gp, mat(&k, 1, 1, &[gp_want]), "g' for ({f},{g},{v})");
        }
        // The ℓ = 1 output has an invertible composite: Fitting dimension 1.
        let t = BalancedTriple::new(pair11(&k, 1, 0), vec![Fel::ONE]).unwrap();
        let (fp, gp) = leinster_forward(&t);
        let out = LinearPair::new(fp, gp).unwrap();
        assert_eq!(fitting_decompose(&out).v_inv.dim(), 1);
    }

    #[test]
    fn leinster_inverse_hand_examples() {
        let k = f2();
        let zero = leinster_inverse(&mat(&k, 1, 1, &[0]), &mat(&k, 1, 1, &[0])).unwrap();
        assert_eq!(zero.pair(), &pair11(&k, 0, 0));
        assert_eq!(zero.v(), &[Fel::ZERO]);
        let t = leinster_inverse(&mat(&k, 1, 1, &[1]), &mat(&k, 1, 1, &[1])).unwrap();
        assert_eq!(t.pair(), &pair11(&k, 1, 0));
        assert_eq!(t.v(), &[Fel::ONE]);
    }

    fn leinster_roundtrip_sweep(field: &Field, m: usize, n: usize) {
        // Every pair of maps decodes to a distinct balanced triple and
        // encodes back to itself.
        let mut seen = HashSet::new();
        let mut total = 0u64;
        for fp in enumerate_matrices(field, n, m) {
            for gp in enumerate_matrices(field, m, n) {
                total += 1;
                let t = leinster_inverse(&fp, &gp).unwrap();
                let (fp2, gp2) = leinster_forward(&t);
                assert_eq!((&fp2, &gp2), (&fp, &gp), "forward∘inverse at {m}x{n}");
                assert!(seen.insert(format!("{t:?}")), "inverse must be injective");
            }
        }
        assert_eq!(seen.len() as u64, total);
        // Every balanced triple encodes and decodes back to itself, and the
        // census matches |Hom × Hom|.
        let mut triples = 0u64;
        for pair in nilpotent_pairs(field, m, n) {
            for v in enumerate_vectors(field, m) {
                let Ok(t) = BalancedTriple::new(pair.clone(), v) else {
                    continue;
                };
                triples += 1;
                let (fp, gp) = leinster_forward(&t);
                assert_eq!(leinster_inverse(&fp, &gp).unwrap(), t, "inverse∘forward");
            }
        }
        assert_eq!(triples, total, "|balanced triples| = q^(2mn)");
    }

    #[test]
    fn leinster_roundtrip_exhaustive_q2() {
        let k = f2();
        for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            leinster_roundtrip_sweep(&k, m, n);
        }
    }

    #[test]
    fn leinster_roundtrip_wide_q2() {
        // 4096 pairs of maps on each orientation.
        let k = f2();
        leinster_roundtrip_sweep(&k, 2, 3);
        leinster_roundtrip_sweep(&k, 3, 2);
    }

    #[test]
    fn leinster_roundtrip_exhaustive_q3() {
        leinster_roundtrip_sweep(&Field::gf(3).unwrap(), 1, 1);
    }

    /// The same construction mirrored through swap: W-side triples also
    /// census to q^(2mn) and roundtrip.
    #[test]
    fn leinster_w_side_mirror() {
        let k = f2();
        for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let mut triples = 0u64;
            for pair in nilpotent_pairs(&k, m, n) {
                for w in enumerate_vectors(&k, n) {
                    if !classify_vector(&pair, &w, Side::W).unwrap().is_balanced() {
                        continue;
                    }
                    triples += 1;
                    let (fp, gp) = leinster_forward_w(&pair, &w);
                    let (pair2, w2) = leinster_inverse_w(&fp, &gp).unwrap();
                    assert_eq!((pair2, w2), (pair.clone(), w));
                }
            }
            assert_eq!(triples, 1u64 << (2 * m * n));
        }
    }

    #[test]
    fn rho_hand_example() {
        let k = f2();
        let quad = Quadruple::new(pair11(&k, 1, 0), vec![Fel::ONE], vec![Fel::ZERO]).unwrap();
        let out = rho(&quad).unwrap();
        assert_eq!(out.pair(), &pair11(&k, 0, 0));
        assert_eq!(out.v(), &[Fel::ONE]);
        assert_eq!(out.w(), &[Fel::ONE]);
        let back = rho_prime(&out).unwrap();
        assert_eq!(back, quad);
        // Guards.
        assert_eq!(
            rho(&Quadruple::new(pair11(&k, 1, 0), vec![Fel::ZERO], vec![Fel::ZERO]).unwrap())
                .unwrap_err(),
            BijectionError::ZeroBalancedVector
        );
        assert!(matches!(rho(&out).unwrap_err(), BijectionError::FlavorMismatch(_)));
        assert!(matches!(rho_prime(&quad).unwrap_err(), BijectionError::FlavorMismatch(_)));
    }

    fn quadruples_of(pair: &LinearPair) -> Vec<Quadruple> {
        let field = pair.field().clone();
        let mut out = Vec::new();
        for v in enumerate_vectors(&field, pair.m()) {
            for w in enumerate_vectors(&field, pair.n()) {
                if let Ok(q) = Quadruple::new(pair.clone(), v.clone(), w) {
                    out.push(q);
                }
            }
        }
        out
    }

    #[test]
    fn rho_mutually_inverse_exhaustive() {
        let k = f2();
        for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let mut bb_nonzero = 0u64;
            let mut uu = 0u64;
            let mut images = HashSet::new();
            for pair in nilpotent_pairs(&k, m, n) {
                for quad in quadruples_of(&pair) {
                    match quad.flavor() {
                        Flavor::BalancedBalanced => {
                            if vec_is_zero(quad.v()) {
                                continue;
                            }
                            bb_nonzero += 1;
                            let out = rho(&quad).unwrap();
                            assert_eq!(out.pair().g(), quad.pair().g());
                            assert_eq!(rho_prime(&out).unwrap(), quad, "ρ′∘ρ = id");
                            assert!(images.insert(format!("{out:?}")), "ρ is injective");
                        }
                        Flavor::UnbalancedUnbalanced => {
                            uu += 1;
                            let back = rho_prime(&quad).unwrap();
                            assert_eq!(rho(&back).unwrap(), quad, "ρ∘ρ′ = id");
                        }
                    }
                }
            }
            assert_eq!(bb_nonzero, uu, "ρ is onto at {m}x{n}");
            assert_eq!(images.len() as u64, uu);
        }
    }

    #[test]
    fn quadruple_split_census() {
        let k = f2();
        for (m, n) in [(1, 1), (2, 1), (2, 2)] {
            let mut bb = 0u64;
            let mut hit_uu = HashSet::new();
            let mut hit_w = HashSet::new();
            for pair in nilpotent_pairs(&k, m, n) {
                for quad in quadruples_of(&pair) {
                    if quad.flavor() != Flavor::BalancedBalanced {
                        continue;
                    }
                    bb += 1;
                    let split = quadruple_split(&quad).unwrap();
                    assert_eq!(quadruple_unsplit(&split).unwrap(), quad);
                    match &split {
                        SplitResult::Unbalanced(u) => {
                            assert!(hit_uu.insert(format!("{u:?}")));
                        }
                        SplitResult::TripleInW(t) => {
                            assert!(hit_w.insert(format!("{t:?}")));
                        }
                    }
                }
            }
            // Disjoint-union count: every UU quadruple and every W-triple is
            // hit exactly once, and the W-triples number q^(2mn).
            assert_eq!(bb, hit_uu.len() as u64 + hit_w.len() as u64);
            assert_eq!(hit_w.len() as u64, 1u64 << (2 * m * n));
        }
    }

    fn master_left_elements(field: &Field, m: usize, n: usize) -> Vec<MasterElement> {
        let mut out = Vec::new();
        for f in enumerate_matrices(field, n, m) {
            for g in enumerate_matrices(field, m, n) {
                for w in enumerate_vectors(field, n) {
                    out.push(MasterElement::maps(f.clone(), g.clone(), TaggedVector::W(w)).unwrap());
                }
                for v in enumerate_vectors(field, m) {
                    if !vec_is_zero(&v) {
                        out.push(
                            MasterElement::maps(f.clone(), g.clone(), TaggedVector::V(v)).unwrap(),
                        );
                    }
                }
            }
        }
        out
    }

    fn master_right_elements(field: &Field, m: usize, n: usize) -> Vec<MasterElement> {
        let mut out = Vec::new();
        for pair in nilpotent_pairs(field, m, n) {
            for v in enumerate_vectors(field, m) {
                for w in enumerate_vectors(field, n) {
                    out.push(MasterElement::nilpotent(pair.clone(), v.clone(), w).unwrap());
                }
            }
        }
        out
    }

    fn master_roundtrip_sweep(field: &Field, m: usize, n: usize) {
        let left = master_left_elements(field, m, n);
        let right = master_right_elements(field, m, n);
        assert_eq!(left.len(), right.len(), "side cardinalities at {m}x{n}");
        let mut seen = HashSet::new();
        for e in &left {
            let r = master_forward(e).unwrap();
            assert!(matches!(r, MasterElement::Nilpotent { .. }));
            assert_eq!(&master_inverse(&r).unwrap(), e, "inverse∘forward = id");
            assert!(seen.insert(format!("{r:?}")), "forward is injective");
        }
        assert_eq!(seen.len(), right.len());
        for e in &right {
            let l = master_inverse(e).unwrap();
            assert_eq!(&master_forward(&l).unwrap(), e, "forward∘inverse = id");
        }
    }

    #[test]
    fn master_roundtrip_one_one() {
        master_roundtrip_sweep(&f2(), 1, 1);
        master_roundtrip_sweep(&Field::gf(3).unwrap(), 1, 1);
    }

    #[test]
    fn master_roundtrip_two_two() {
        let k = f2();
        let left = master_left_elements(&k, 2, 2);
        assert_eq!(left.len(), 1792);
        master_roundtrip_sweep(&k, 2, 2);
    }

    #[test]
    fn master_zero_normalization() {
        let k = f2();
        let f = mat(&k, 1, 1, &[1]);
        let g = mat(&k, 1, 1, &[0]);
        let via_v = MasterElement::maps(f.clone(), g.clone(), TaggedVector::V(vec![Fel::ZERO])).unwrap();
        let via_w = MasterElement::maps(f, g, TaggedVector::W(vec![Fel::ZERO])).unwrap();
        assert_eq!(via_v, via_w, "the shared zero has one representation");
    }

    #[test]
    fn master_wrong_side_errors() {
        let k = f2();
        let left = MasterElement::maps(
            mat(&k, 1, 1, &[0]),
            mat(&k, 1, 1, &[0]),
            TaggedVector::W(vec![Fel::ZERO]),
        )
        .unwrap();
        assert!(matches!(
            master_inverse(&left).unwrap_err(),
            BijectionError::InvalidElement(_)
        ));
        let right = MasterElement::nilpotent(pair11(&k, 0, 0), vec![Fel::ZERO], vec![Fel::ZERO]).unwrap();
        assert!(matches!(
            master_forward(&right).unwrap_err(),
            BijectionError::InvalidElement(_)
        ));
    }
}

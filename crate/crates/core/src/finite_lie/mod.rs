//! The finite-dimensional algebra built from a Finite Cartan matrix.
//!
//! Basis layout: `h_1..h_l` (simple coroots), then `E_xi` for the positive
//! roots in [`roots::generate_roots`] order, then `F_xi` in the same order.
//! Non-simple root vectors are defined by a fixed bracket path
//!
//! ```text
//! E_xi = [e_j, E_(xi - a_j)] / (p + 1)      F_xi = -[f_j, F_(xi - a_j)] / (p + 1)
//! ```
//!
//! where `j` is the smallest node with `xi - a_j` a root and `p` is the
//! length of the `a_j`-string below `xi - a_j`. The pair `(a_j, xi - a_j)` is
//! the extraspecial pair of `xi`, so `N_(a_j, xi - a_j) = p + 1 > 0`, and
//! `F_xi = -theta(E_xi)` for the Chevalley involution `theta`, which makes
//! `[E_xi, F_xi]` the positive coroot.
//!
//! The bracket table is derived height by height from the Chevalley
//! relations alone: `[f_k, E_eta]` is obtained by expanding the path of
//! `eta`, and `[e_i, E_xi]` is recovered from its image under `ad f_k`,
//! which is injective on the relevant root space.

pub mod automorphism;
pub mod roots;
pub mod split;

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cartan::{symmetrize, Gcm, GcmClass, Symmetrizer};
use crate::error::{KmxError, Result};
use crate::linalg::inverse;
use crate::scalar::{int, Rational, Scalar};

pub use roots::{generate_roots, highest_root, Root};

/// A basis element of the finite algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    H(usize),
    E(usize),
    F(usize),
}

/// Sparse element of the finite algebra, keyed by basis index.
pub type Element = BTreeMap<usize, Scalar>;

#[derive(Clone, Debug)]
struct Path {
    node: usize,
    parent: usize,
    scale: i64,
}

#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    gcm: Gcm,
    positive: Vec<Root>,
    pos_index: HashMap<Root, usize>,
    paths: Vec<Option<Path>>,
    table: Vec<Vec<Vec<(usize, i64)>>>,
    /// `(xi, xi)` for each positive root, with long roots of norm 2.
    norms: Vec<Rational>,
    sym: Symmetrizer,
    /// `[E_xi, F_xi]` in the `h` basis.
    coroots: Vec<Vec<i64>>,
    h_form: Vec<Vec<Rational>>,
    highest: usize,
}

type Vector = BTreeMap<usize, Rational>;

fn axpy(acc: &mut Vector, c: &Rational, x: &Vector) {
    for (k, v) in x {
        let e = acc.entry(*k).or_insert_with(Rational::zero);
        *e += c * v;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

fn add_term(acc: &mut Vector, k: usize, v: Rational) {
    let e = acc.entry(k).or_insert_with(Rational::zero);
    *e += v;
    if e.is_zero() {
        acc.remove(&k);
    }
}

impl FiniteAlgebra {
    pub fn new(gcm: &Gcm) -> Result<FiniteAlgebra> {
        if gcm.class() != GcmClass::Finite {
            return Err(KmxError::Rejected(format!(
                "finite algebra construction needs a Finite Cartan matrix, got {} ({})",
                gcm,
                gcm.class()
            )));
        }
        let l = gcm.n();
        let positive: Vec<Root> =
            generate_roots(gcm)?.into_iter().filter(Root::is_positive).collect();
        let pos_index: HashMap<Root, usize> =
            positive.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let is_root = |r: &Root| r.is_positive() && pos_index.contains_key(r)
            || (!r.is_zero() && pos_index.contains_key(&-r));

        let paths: Vec<Option<Path>> = positive
            .iter()
            .map(|xi| {
                if xi.height() == 1 {
                    return None;
                }
                let node = (0..l)
                    .find(|&j| pos_index.contains_key(&(xi - &Root::simple(l, j))))
                    .expect("non-simple positive root has a simple predecessor");
                let aj = Root::simple(l, node);
                let parent = xi - &aj;
                let mut p = 0;
                let mut r = &parent - &aj;
                while is_root(&r) {
                    p += 1;
                    r = &r - &aj;
                }
                Some(Path { node, parent: pos_index[&parent], scale: p + 1 })
            })
            .collect();

        let alg_sym = symmetrize(gcm)?;
        let mut alg = FiniteAlgebra {
            gcm: gcm.clone(),
            positive,
            pos_index,
            paths,
            table: Vec::new(),
            norms: Vec::new(),
            sym: alg_sym,
            coroots: Vec::new(),
            h_form: Vec::new(),
            highest: 0,
        };
        alg.normalize_norms();
        alg.build_table()?;
        alg.build_form()?;
        Ok(alg)
    }

    fn normalize_norms(&mut self) {
        let l = self.rank();
        let raw = |r: &Root, d: &[Rational]| -> Rational {
            let mut s = Rational::zero();
            for i in 0..l {
                for j in 0..l {
                    if r.0[i] != 0 && r.0[j] != 0 {
                        s += &d[i] * int(self.gcm.get(i, j) * r.0[i] * r.0[j]);
                    }
                }
            }
            s
        };
        let highest = self
            .positive
            .iter()
            .enumerate()
            .max_by_key(|(_, r)| r.height())
            .map(|(i, _)| i)
            .unwrap();
        // (a_i, a_j) = kappa d_i A_ij; choose kappa with (gamma, gamma) = 2,
        // then store d'_i = (a_i, a_i) / 2 as the rescaled symmetrizer.
        let g = raw(&self.positive[highest], &self.sym.d);
        let kappa = int(2) / g;
        let d: Vec<Rational> = self.sym.d.iter().map(|x| x * &kappa).collect();
        self.norms = self.positive.iter().map(|r| raw(r, &d)).collect();
        self.sym = Symmetrizer { d };
        self.highest = highest;
    }

    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    pub fn rank(&self) -> usize {
        self.gcm.n()
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn dim(&self) -> usize {
        self.rank() + 2 * self.positive.len()
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    /// All roots, sorted by height.
    pub fn roots(&self) -> Vec<Root> {
        let mut v: Vec<Root> = self.positive.iter().map(|r| -r).collect();
        v.extend(self.positive.iter().cloned());
        v.sort_by_key(roots::root_order_key);
        v
    }

    pub fn positive_index(&self, r: &Root) -> Option<usize> {
        self.pos_index.get(r).copied()
    }

    pub fn is_root(&self, r: &Root) -> bool {
        if r.is_positive() {
            self.pos_index.contains_key(r)
        } else {
            !r.is_zero() && self.pos_index.contains_key(&-r)
        }
    }

    /// Rescaled symmetrizer: `d_i = (a_i, a_i) / 2` with long roots of norm 2.
    pub fn symmetrizer(&self) -> &Symmetrizer {
        &self.sym
    }

    pub fn highest_root(&self) -> &Root {
        &self.positive[self.highest]
    }

    pub fn highest_root_index(&self) -> usize {
        self.highest
    }

    /// `(xi, xi)` for a positive root index.
    pub fn root_norm(&self, r: usize) -> &Rational {
        &self.norms[r]
    }

    /// `(a, b)` for arbitrary root-lattice vectors.
    pub fn root_inner(&self, a: &Root, b: &Root) -> Rational {
        let l = self.rank();
        let mut s = Rational::zero();
        for i in 0..l {
            for j in 0..l {
                let c = a.0[i] * b.0[j];
                if c != 0 {
                    s += &self.sym.d[i] * int(self.gcm.get(i, j) * c);
                }
            }
        }
        s
    }

    /// Coefficients of `[E_xi, F_xi]` on `h_1..h_l`.
    pub fn coroot(&self, r: usize) -> &[i64] {
        &self.coroots[r]
    }

    // --- basis indexing -------------------------------------------------

    #[inline]
    pub fn h(&self, i: usize) -> usize {
        i
    }

    #[inline]
    pub fn e_root(&self, r: usize) -> usize {
        self.rank() + r
    }

    #[inline]
    pub fn f_root(&self, r: usize) -> usize {
        self.rank() + self.positive.len() + r
    }

    pub fn simple_index(&self, i: usize) -> usize {
        self.pos_index[&Root::simple(self.rank(), i)]
    }

    pub fn e(&self, i: usize) -> usize {
        self.e_root(self.simple_index(i))
    }

    pub fn f(&self, i: usize) -> usize {
        self.f_root(self.simple_index(i))
    }

    pub fn kind(&self, idx: usize) -> Basis {
        let l = self.rank();
        let p = self.positive.len();
        if idx < l {
            Basis::H(idx)
        } else if idx < l + p {
            Basis::E(idx - l)
        } else {
            Basis::F(idx - l - p)
        }
    }

    /// Weight of a basis element (zero for the Cartan part).
    pub fn weight(&self, idx: usize) -> Root {
        match self.kind(idx) {
            Basis::H(_) => Root::zero(self.rank()),
            Basis::E(r) => self.positive[r].clone(),
            Basis::F(r) => -&self.positive[r],
        }
    }

    pub fn basis_name(&self, idx: usize) -> String {
        match self.kind(idx) {
            Basis::H(i) => format!("h{}", i + 1),
            Basis::E(r) => format!("e[{}]", self.positive[r].label()),
            Basis::F(r) => format!("f[{}]", self.positive[r].label()),
        }
    }

    pub fn parse_basis_name(&self, s: &str) -> Result<usize> {
        let bad = || KmxError::Parse(format!("unknown basis element {s:?}"));
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('h') {
            let i: usize = rest.parse().map_err(|_| bad())?;
            if i == 0 || i > self.rank() {
                return Err(bad());
            }
            return Ok(i - 1);
        }
        let (kind, inner) = if let Some(x) = s.strip_prefix("e[") {
            ('e', x)
        } else if let Some(x) = s.strip_prefix("f[") {
            ('f', x)
        } else {
            return Err(bad());
        };
        let inner = inner.strip_suffix(']').ok_or_else(bad)?;
        let root = Root::parse_label(inner, self.rank()).ok_or_else(bad)?;
        let r = self.positive_index(&root).ok_or_else(bad)?;
        Ok(if kind == 'e' { self.e_root(r) } else { self.f_root(r) })
    }

    // --- brackets -------------------------------------------------------

    /// `[b_a, b_b]` as a sparse integer combination of basis elements.
    #[inline]
    pub fn bracket_basis(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.table[a][b]
    }

    pub fn bracket(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::new();
        for (a, ca) in x {
            for (b, cb) in y {
                let t = &self.table[*a][*b];
                if t.is_empty() {
                    continue;
                }
                let c = ca * cb;
                for (k, n) in t {
                    let e = out.entry(*k).or_default();
                    *e += &c * &Scalar::from_int(*n);
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn basis_element(&self, idx: usize) -> Element {
        Element::from([(idx, Scalar::one())])
    }

    /// Structure constant `N_(a,b)` with `[E_a, E_b] = N E_(a+b)`, using
    /// `E_(-xi) = F_xi`. `None` when `a + b` is not a root.
    pub fn structure_constant(&self, a: &Root, b: &Root) -> Option<i64> {
        let s = a + b;
        if !self.is_root(&s) || !self.is_root(a) || !self.is_root(b) {
            return None;
        }
        let idx = |r: &Root| {
            if r.is_positive() {
                self.e_root(self.pos_index[r])
            } else {
                self.f_root(self.pos_index[&-r])
            }
        };
        let target = idx(&s);
        let t = &self.table[idx(a)][idx(b)];
        Some(t.iter().find(|(k, _)| *k == target).map_or(0, |(_, n)| *n))
    }

    // --- invariant form -------------------------------------------------

    /// Normalized invariant form on basis elements, `(gamma, gamma) = 2`.
    pub fn invariant_form_basis(&self, a: usize, b: usize) -> Rational {
        match (self.kind(a), self.kind(b)) {
            (Basis::H(i), Basis::H(j)) => self.h_form[i][j].clone(),
            (Basis::E(r), Basis::F(s)) | (Basis::F(s), Basis::E(r)) if r == s => {
                int(2) / &self.norms[r]
            }
            _ => Rational::zero(),
        }
    }

    pub fn invariant_form(&self, x: &Element, y: &Element) -> Scalar {
        let mut acc = Scalar::zero();
        for (a, ca) in x {
            for (b, cb) in y {
                let f = self.invariant_form_basis(*a, *b);
                if !f.is_zero() {
                    acc += &(&(ca * cb) * &Scalar::from_rational(f));
                }
            }
        }
        acc
    }

    // --- construction ---------------------------------------------------

    fn build_table(&mut self) -> Result<()> {
        let l = self.rank();
        let np = self.positive.len();
        let dim = self.dim();
        let a = |i: usize, j: usize| self.gcm.get(i, j);

        // ee[(i, r)]: [e_i, E_r] = ee * E_(r + a_i); fe[(k, r)]: [f_k, E_r] =
        // fe * E_(r - a_k) for height(r) >= 2.
        let mut ee: HashMap<(usize, usize), Rational> = HashMap::new();
        let mut fe: HashMap<(usize, usize), Rational> = HashMap::new();
        let max_h = self.positive.iter().map(Root::height).max().unwrap_or(1);
        let simple = |i: usize| Root::simple(l, i);

        for h in 2..=max_h {
            // [f_k, E_eta] for height(eta) = h.
            for eta in 0..np {
                if self.positive[eta].height() != h {
                    continue;
                }
                let path = self.paths[eta].clone().unwrap();
                let j = path.node;
                let pi = &self.positive[path.parent];
                for k in 0..l {
                    let mut val = Rational::zero();
                    if k == j {
                        val -= int(pi.pair_coroot(&self.gcm, j));
                    }
                    if pi.height() == 1 {
                        let m = pi.0.iter().position(|&x| x == 1).unwrap();
                        if k == m {
                            val += int(a(m, j));
                        }
                    } else {
                        let below = pi - &simple(k);
                        if let Some(&bi) = self.pos_index.get(&below) {
                            let b = fe.get(&(k, path.parent)).cloned().unwrap_or_default();
                            let c = ee.get(&(j, bi)).cloned().unwrap_or_default();
                            val += b * c;
                        }
                    }
                    val /= int(path.scale);
                    let target = &self.positive[eta] - &simple(k);
                    if self.pos_index.contains_key(&target) {
                        fe.insert((k, eta), val);
                    } else if !val.is_zero() {
                        return Err(KmxError::Internal(format!(
                            "[f_{}, E_{}] leaves the root system",
                            k + 1,
                            self.positive[eta]
                        )));
                    }
                }
            }
            // [e_i, E_xi] for height(xi) = h - 1.
            for xi in 0..np {
                if self.positive[xi].height() != h - 1 {
                    continue;
                }
                for i in 0..l {
                    let eta_root = &self.positive[xi] + &simple(i);
                    let Some(&eta) = self.pos_index.get(&eta_root) else {
                        continue;
                    };
                    let k = self.paths[eta].as_ref().unwrap().node;
                    let mut val = Rational::zero();
                    if k == i {
                        val -= int(self.positive[xi].pair_coroot(&self.gcm, i));
                    }
                    let xr = &self.positive[xi];
                    if xr.height() == 1 {
                        let m = xr.0.iter().position(|&x| x == 1).unwrap();
                        if k == m {
                            val += int(a(m, i));
                        }
                    } else {
                        let below = xr - &simple(k);
                        if let Some(&bi) = self.pos_index.get(&below) {
                            let b = fe.get(&(k, xi)).cloned().unwrap_or_default();
                            let c = ee.get(&(i, bi)).cloned().unwrap_or_default();
                            val += b * c;
                        }
                    }
                    let denom = fe.get(&(k, eta)).cloned().unwrap_or_default();
                    if denom.is_zero() {
                        return Err(KmxError::Internal(format!(
                            "ad f_{} vanishes on E_{}",
                            k + 1,
                            eta_root
                        )));
                    }
                    ee.insert((i, xi), val / denom);
                }
            }
        }

        // Generator actions on the whole basis.
        let e_act = |i: usize, b: usize| -> Vector {
            let mut v = Vector::new();
            match self.kind(b) {
                Basis::H(m) => add_term(&mut v, self.e(i), int(-a(m, i))),
                Basis::E(r) => {
                    let t = &self.positive[r] + &simple(i);
                    if let Some(&ti) = self.pos_index.get(&t) {
                        add_term(&mut v, self.e_root(ti), ee[&(i, r)].clone());
                    }
                }
                Basis::F(r) => {
                    let xr = &self.positive[r];
                    if xr.height() == 1 {
                        if xr.0[i] == 1 {
                            add_term(&mut v, self.h(i), Rational::one());
                        }
                    } else if let Some(&ti) = self.pos_index.get(&(xr - &simple(i))) {
                        add_term(&mut v, self.f_root(ti), -fe[&(i, r)].clone());
                    }
                }
            }
            v
        };
        let f_act = |i: usize, b: usize| -> Vector {
            let mut v = Vector::new();
            match self.kind(b) {
                Basis::H(m) => add_term(&mut v, self.f(i), int(a(m, i))),
                Basis::F(r) => {
                    let t = &self.positive[r] + &simple(i);
                    if let Some(&ti) = self.pos_index.get(&t) {
                        add_term(&mut v, self.f_root(ti), -ee[&(i, r)].clone());
                    }
                }
                Basis::E(r) => {
                    let xr = &self.positive[r];
                    if xr.height() == 1 {
                        if xr.0[i] == 1 {
                            add_term(&mut v, self.h(i), -Rational::one());
                        }
                    } else if let Some(&ti) = self.pos_index.get(&(xr - &simple(i))) {
                        add_term(&mut v, self.e_root(ti), fe[&(i, r)].clone());
                    }
                }
            }
            v
        };
        let apply_gen = |e_side: bool, i: usize, x: &Vector| -> Vector {
            let mut out = Vector::new();
            for (b, c) in x {
                let img = if e_side { e_act(i, *b) } else { f_act(i, *b) };
                axpy(&mut out, c, &img);
            }
            out
        };

        let mut rows: Vec<Vec<Vector>> = vec![Vec::new(); dim];
        for i in 0..l {
            rows[self.h(i)] = (0..dim)
                .map(|b| {
                    let mut v = Vector::new();
                    let w = self.weight(b);
                    if !w.is_zero() {
                        add_term(&mut v, b, int(w.pair_coroot(&self.gcm, i)));
                    }
                    v
                })
                .collect();
        }
        let apply_row = |row: &Vec<Vector>, x: &Vector| -> Vector {
            let mut out = Vector::new();
            for (b, c) in x {
                axpy(&mut out, c, &row[*b]);
            }
            out
        };
        for (e_side, sign) in [(true, int(1)), (false, int(-1))] {
            for r in 0..np {
                let idx = if e_side { self.e_root(r) } else { self.f_root(r) };
                let row: Vec<Vector> = match &self.paths[r] {
                    None => {
                        let i = self.positive[r].0.iter().position(|&x| x == 1).unwrap();
                        (0..dim).map(|b| if e_side { e_act(i, b) } else { f_act(i, b) }).collect()
                    }
                    Some(p) => {
                        let pidx = if e_side { self.e_root(p.parent) } else { self.f_root(p.parent) };
                        let prow = rows[pidx].clone();
                        let factor = &sign / int(p.scale);
                        (0..dim)
                            .map(|b| {
                                let one = Vector::from([(b, Rational::one())]);
                                let left = apply_gen(e_side, p.node, &prow[b]);
                                let right = apply_row(&prow, &apply_gen(e_side, p.node, &one));
                                let mut v = Vector::new();
                                axpy(&mut v, &factor, &left);
                                axpy(&mut v, &-factor.clone(), &right);
                                v
                            })
                            .collect()
                    }
                };
                rows[idx] = row;
            }
        }

        let mut table = vec![vec![Vec::new(); dim]; dim];
        for (x, row) in rows.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                table[x][y] = v
                    .iter()
                    .map(|(k, c)| {
                        if !c.is_integer() {
                            return Err(KmxError::Internal(format!(
                                "non-integral structure constant in [{}, {}]",
                                self.basis_name(x),
                                self.basis_name(y)
                            )));
                        }
                        Ok((*k, c.to_integer().to_i64().unwrap()))
                    })
                    .collect::<Result<Vec<_>>>()?;
            }
        }
        self.table = table;
        Ok(())
    }

    fn build_form(&mut self) -> Result<()> {
        let l = self.rank();
        self.coroots = (0..self.positive.len())
            .map(|r| {
                let mut v = vec![0; l];
                for (k, c) in &self.table[self.e_root(r)][self.f_root(r)] {
                    v[*k] = *c;
                }
                v
            })
            .collect();
        // (h_i, h_j) = A_ji / d_i with d_i = (a_i, a_i) / 2.
        self.h_form = (0..l)
            .map(|i| (0..l).map(|j| int(self.gcm.get(j, i)) / &self.sym.d[i]).collect())
            .collect();
        // Sanity: [E_xi, F_xi] is the positive coroot 2 xi / (xi, xi).
        for (r, xi) in self.positive.iter().enumerate() {
            for i in 0..l {
                let want = int(xi.0[i]) * int(2) * &self.sym.d[i] / &self.norms[r];
                if want != int(self.coroots[r][i]) {
                    return Err(KmxError::Internal(format!(
                        "[E_xi, F_xi] is not the coroot for xi = {xi}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Fundamental weights `L_j` of a Finite Cartan matrix in simple-root
/// coordinates: column `j` of `A^{-1}`, so that `L_j(h_k) = delta_jk`.
pub fn fundamental_weights_finite(gcm: &Gcm) -> Result<Vec<Vec<Rational>>> {
    if gcm.class() != GcmClass::Finite {
        return Err(KmxError::Rejected(format!("{gcm} is not of Finite class")));
    }
    let inv = cartan_inverse(gcm)?;
    let l = gcm.n();
    Ok((0..l).map(|j| (0..l).map(|m| inv[m][j].clone()).collect()).collect())
}

/// Exact inverse of the Cartan matrix.
pub fn cartan_inverse(gcm: &Gcm) -> Result<Vec<Vec<Rational>>> {
    let m: Vec<Vec<Rational>> =
        gcm.entries().iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    inverse(&m).ok_or_else(|| KmxError::Internal(format!("Cartan matrix {gcm} is singular")))
}

/// Value of a simple-root-coordinate weight on `h_k`.
pub fn weight_on_coroot(gcm: &Gcm, coords: &[Rational], k: usize) -> Rational {
    coords.iter().enumerate().map(|(m, c)| c * int(gcm.get(k, m))).sum()
}

#[allow(dead_code)]
pub(crate) fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

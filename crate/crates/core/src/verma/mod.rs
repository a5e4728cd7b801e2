//! Contravariant forms on (generalized) Verma modules.
//!
//! A block is spanned by words `t_1 t_2 .. t_r v` in lowering tokens. The
//! form is evaluated through contravariance,
//!
//! ```text
//! H(u, t w) = H(omega(t) u, w)        H(v, v) = 1
//! ```
//!
//! where `omega(t) u` is straightened back onto words. Two routes exist:
//!
//! * generators: tokens `f_i`, raising by `e_i` only needs the Cartan
//!   matrix, `e_i f_t1 .. f_tr v = sum_(k: t_k = i) (Lambda(h_i) - sum_(m>k) A_(i,t_m)) (.. f_tk omitted ..) v`;
//! * loop: tokens `z^k (x) x` in the complement `n` of the parabolic `p`,
//!   with `P (t rest) = [P, t] rest + t (P rest)` and `P v = Lambda(P) v`.
//!
//! Worked example (`A1~`, `Lambda = Lambda_0`, drop `a0 + a1`): the words
//! `f0 f1 v`, `f1 f0 v` have Gram matrix `diag(0, 2)`, since
//! `e0 f0 f1 v = 3 f1 v` with `Lambda(h1) = 0`, and `e1 f1 f0 v = 2 f0 v`.

pub mod psd;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::affine::{AffineAlgebra, LoopElement};
use crate::cartan::Gcm;
use crate::error::{KmxError, Result};
use crate::finite_lie::split::{split_for, su_n1_star, MatrixRealization};
use crate::finite_lie::{Basis, Element, FiniteAlgebra};
use crate::scalar::Scalar;

pub use psd::{kernel_basis, psd_verdict, Verdict};

/// Default bound on the number of words in one block.
pub const DEFAULT_BLOCK_CAP: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    StandardBorel,
    NaturalParabolic,
    ExceptionalParabolic,
}

/// A lowering token: a Chevalley generator `f_i` (generators route) or a
/// loop basis element `z^deg (x) b` of `n` (loop route).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    F(usize),
    Z { deg: i64, basis: usize },
}

pub type Word = Vec<Token>;

/// Linear combination of words.
pub type Comb = BTreeMap<Word, Scalar>;

fn comb_add(acc: &mut Comb, w: Word, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.entry(w) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn comb_axpy(acc: &mut Comb, s: &Scalar, x: &Comb) {
    for (w, c) in x {
        comb_add(acc, w.clone(), s * c);
    }
}

/// `Lambda(z^deg (x) h_j)` for finite node `j`.
pub type CartanFunctional = Arc<dyn Fn(i64, usize) -> Scalar + Send + Sync>;

#[derive(Clone, Debug)]
pub struct GeneratorData {
    gcm: Gcm,
    lambda: Vec<Scalar>,
    /// `omega(f_i) = s_i e_i`, `omega(e_i) = s_i f_i`, `omega(h_i) = h_i`.
    signs: Vec<i64>,
}

#[derive(Clone)]
pub struct LoopData {
    aff: Arc<AffineAlgebra>,
    /// `omega(z^k x) = z^-k omega_dot(x)` with `omega_dot` on basis elements.
    omega: Vec<Element>,
    lambda_h: CartanFunctional,
    c_value: Scalar,
    d_value: Scalar,
    /// Basis elements that lie in `p` at degree 0, and at every degree in
    /// the parabolic modes.
    p_table: Vec<bool>,
    standard: bool,
    /// Images of the affine generators `f_i` as tokens.
    gen_tokens: Vec<Token>,
}

impl fmt::Debug for LoopData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LoopData").field("c", &self.c_value).field("d", &self.d_value).finish()
    }
}

impl LoopData {
    fn in_p(&self, deg: i64, b: usize) -> bool {
        if self.standard && deg != 0 {
            deg > 0
        } else {
            self.p_table[b]
        }
    }
}

#[derive(Clone, Debug)]
pub enum Route {
    Generators(GeneratorData),
    Loop(LoopData),
}

/// Raising or Cartan element acting on words in the generators route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    E(usize),
    F(usize),
    H(usize),
}

/// Element of the algebra acting on the module.
#[derive(Clone, Debug)]
pub enum Action {
    Gen(Gen, Scalar),
    Loop(LoopElement),
}

/// Block label: weight drop and either the total loop degree (standard
/// Borel) or the per-token degree window (parabolic modes).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BlockLabel {
    pub drop: Vec<i64>,
    pub window: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct FormContext {
    mode: Mode,
    route: Route,
    exact: bool,
    cap: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramBlock {
    pub drop: Vec<i64>,
    pub degree: Option<i64>,
    pub window: Option<i64>,
    pub words: Vec<Word>,
    pub matrix: Vec<Vec<Scalar>>,
    pub verdict: Verdict,
    pub exact: bool,
    pub kernel: Vec<Vec<Scalar>>,
}

impl GramBlock {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn label(&self) -> BlockLabel {
        BlockLabel { drop: self.drop.clone(), window: self.window }
    }
}

impl FormContext {
    /// Generators route over any GCM with `omega(f_i) = signs[i] e_i`.
    pub fn generators(gcm: Gcm, lambda: Vec<Scalar>, signs: Vec<i64>) -> Result<FormContext> {
        let n = gcm.n();
        if lambda.len() != n || signs.len() != n {
            return Err(KmxError::Rejected(format!(
                "need {n} weight values and {n} signs, got {} and {}",
                lambda.len(),
                signs.len()
            )));
        }
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(KmxError::Rejected("omega signs must be +1 or -1".into()));
        }
        if lambda.iter().any(|l| l.real_sign().is_none()) {
            return Err(KmxError::Rejected(
                "Lambda(h_i) must be real for a Hermitian form".into(),
            ));
        }
        let exact = lambda.iter().all(Scalar::is_exact);
        Ok(FormContext {
            mode: Mode::StandardBorel,
            route: Route::Generators(GeneratorData { gcm, lambda, signs }),
            exact,
            cap: DEFAULT_BLOCK_CAP,
        })
    }

    /// Loop route. `omega` gives `omega_dot` on every finite basis element.
    #[allow(clippy::too_many_arguments)]
    pub fn loop_route(
        aff: Arc<AffineAlgebra>,
        mode: Mode,
        omega: Vec<Element>,
        lambda_h: CartanFunctional,
        c_value: Scalar,
        d_value: Scalar,
        exact: bool,
    ) -> Result<FormContext> {
        let alg = aff.finite();
        let dim = alg.dim();
        if omega.len() != dim {
            return Err(KmxError::Rejected("omega table has the wrong size".into()));
        }
        let not_f = |b: usize| !matches!(alg.kind(b), Basis::F(_));
        let p_table: Vec<bool> = match mode {
            Mode::StandardBorel | Mode::NaturalParabolic => (0..dim).map(not_f).collect(),
            Mode::ExceptionalParabolic => {
                let real = MatrixRealization::new(alg)?;
                (0..dim).map(|b| real.is_upper_triangular(&alg.basis_element(b))).collect()
            }
        };
        let l = alg.rank();
        let mut gen_tokens = vec![Token::Z { deg: -1, basis: alg.e_root(alg.highest_root_index()) }];
        gen_tokens.extend((0..l).map(|i| Token::Z { deg: 0, basis: alg.f(i) }));
        let ctx = FormContext {
            mode,
            route: Route::Loop(LoopData {
                aff,
                omega,
                lambda_h,
                c_value,
                d_value,
                p_table,
                standard: mode == Mode::StandardBorel,
                gen_tokens,
            }),
            exact,
            cap: DEFAULT_BLOCK_CAP,
        };
        ctx.check_omega()?;
        Ok(ctx)
    }

    pub fn with_cap(mut self, cap: usize) -> FormContext {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn route(&self) -> &Route {
        &self.route
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn affine(&self) -> Option<&Arc<AffineAlgebra>> {
        match &self.route {
            Route::Loop(d) => Some(&d.aff),
            Route::Generators(_) => None,
        }
    }

    /// Number of weight-drop coordinates.
    pub fn drop_len(&self) -> usize {
        match (&self.route, self.mode) {
            (Route::Generators(g), _) => g.gcm.n(),
            (Route::Loop(d), Mode::StandardBorel) => d.aff.nodes(),
            (Route::Loop(d), _) => d.aff.finite().rank(),
        }
    }

    /// The lowering generators `f_i` as tokens of this route.
    pub fn generator_token(&self, i: usize) -> Token {
        match &self.route {
            Route::Generators(_) => Token::F(i),
            Route::Loop(d) => d.gen_tokens[i],
        }
    }

    fn check_omega(&self) -> Result<()> {
        let Route::Loop(d) = &self.route else { return Ok(()) };
        let alg = d.aff.finite();
        for b in 0..alg.dim() {
            let x = LoopElement::term(1, b, Scalar::one());
            let back = self.apply_omega(&self.apply_omega(&x)?)?;
            if back != x {
                return Err(KmxError::Rejected(format!(
                    "omega is not an involution on {}",
                    alg.basis_name(b)
                )));
            }
        }
        Ok(())
    }

    /// `omega(sum a_k z^k x_k + c' c + d' d) = sum conj(a_k) z^-k omega(x_k) + ..`.
    pub fn apply_omega(&self, x: &LoopElement) -> Result<LoopElement> {
        let Route::Loop(d) = &self.route else {
            return Err(KmxError::Unsupported(
                "loop elements need a loop-route context".into(),
            ));
        };
        let mut out = LoopElement::central(x.c_coeff().conj())
            .add(&LoopElement::derivation(x.d_coeff().conj()));
        for (&(deg, b), v) in x.terms() {
            let cv = v.conj();
            for (k, w) in &d.omega[b] {
                out.add_term(-deg, *k, &cv * w);
            }
        }
        Ok(out)
    }

    /// `omega` on a generator-route action.
    pub fn omega_action(&self, a: &Action) -> Result<Action> {
        match (a, &self.route) {
            (Action::Gen(g, c), Route::Generators(d)) => {
                let c = c.conj();
                Ok(match *g {
                    Gen::E(i) => Action::Gen(Gen::F(i), &c * &Scalar::from_int(d.signs[i])),
                    Gen::F(i) => Action::Gen(Gen::E(i), &c * &Scalar::from_int(d.signs[i])),
                    Gen::H(i) => Action::Gen(Gen::H(i), c),
                })
            }
            (Action::Loop(x), Route::Loop(_)) => Ok(Action::Loop(self.apply_omega(x)?)),
            _ => Err(KmxError::Unsupported("action does not match the context route".into())),
        }
    }

    /// Weight drop of a token.
    pub fn token_drop(&self, t: &Token) -> Vec<i64> {
        let n = self.drop_len();
        let mut v = vec![0; n];
        match (t, &self.route) {
            (Token::F(i), _) => v[*i] = 1,
            (Token::Z { deg, basis }, Route::Loop(d)) => {
                let alg = d.aff.finite();
                let mu = alg.weight(*basis);
                if self.mode == Mode::StandardBorel {
                    let marks = d.aff.marks();
                    v[0] = -deg;
                    for i in 0..alg.rank() {
                        v[i + 1] = -mu.0[i] - deg * marks[i + 1];
                    }
                } else {
                    for i in 0..alg.rank() {
                        v[i] = -mu.0[i];
                    }
                }
            }
            (Token::Z { .. }, Route::Generators(_)) => {}
        }
        v
    }

    pub fn word_drop(&self, w: &[Token]) -> Vec<i64> {
        let mut v = vec![0; self.drop_len()];
        for t in w {
            for (a, b) in v.iter_mut().zip(self.token_drop(t)) {
                *a += b;
            }
        }
        v
    }

    pub fn word_degree(&self, w: &[Token]) -> i64 {
        w.iter()
            .map(|t| match t {
                Token::F(0) => -1,
                Token::F(_) => 0,
                Token::Z { deg, .. } => *deg,
            })
            .sum()
    }

    pub fn token_name(&self, t: &Token) -> String {
        match (t, &self.route) {
            (Token::F(i), _) => format!("f{i}"),
            (Token::Z { deg, basis }, Route::Loop(d)) => {
                format!("z^{deg}.{}", d.aff.finite().basis_name(*basis))
            }
            (Token::Z { deg, basis }, _) => format!("z^{deg}.b{basis}"),
        }
    }

    pub fn word_name(&self, w: &[Token]) -> String {
        if w.is_empty() {
            return "v".into();
        }
        let parts: Vec<String> = w.iter().map(|t| self.token_name(t)).collect();
        format!("{} v", parts.join(" "))
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator { ctx: self, form_cache: RefCell::default(), act_cache: RefCell::default() }
    }

    pub fn form_value(&self, u: &[Token], w: &[Token]) -> Result<Scalar> {
        self.evaluator().form(u, w)
    }

    /// Spanning words of a block. Standard Borel: every distinct ordering of
    /// the multiset of generators. Parabolic modes: non-decreasing sequences
    /// of tokens `z^k (x) F_xi` with `|k| <= window`.
    pub fn block_words(&self, label: &BlockLabel) -> Result<Vec<Word>> {
        let n = self.drop_len();
        if label.drop.len() != n || label.drop.iter().any(|&k| k < 0) {
            return Err(KmxError::Rejected(format!(
                "weight drop must have {n} nonnegative entries"
            )));
        }
        let mut out = Vec::new();
        match self.mode {
            Mode::StandardBorel => {
                let mut counts = label.drop.clone();
                let total: i64 = counts.iter().sum();
                let mut cur = Vec::with_capacity(total as usize);
                let mut idx: Vec<Vec<usize>> = Vec::new();
                permutations(&mut counts, &mut cur, total as usize, &mut idx, self.cap)?;
                out = idx
                    .into_iter()
                    .map(|w| w.into_iter().map(|i| self.generator_token(i)).collect())
                    .collect();
            }
            Mode::NaturalParabolic | Mode::ExceptionalParabolic => {
                let Route::Loop(d) = &self.route else { unreachable!() };
                let m = label.window.ok_or_else(|| {
                    KmxError::Rejected("parabolic blocks need a degree window".into())
                })?;
                if m < 0 {
                    return Err(KmxError::Rejected("degree window must be nonnegative".into()));
                }
                let alg = d.aff.finite();
                let mut tokens = Vec::new();
                for deg in -m..=m {
                    for b in 0..alg.dim() {
                        if !d.in_p(deg, b) {
                            tokens.push(Token::Z { deg, basis: b });
                        }
                    }
                }
                tokens.sort();
                let drops: Vec<Vec<i64>> = tokens.iter().map(|t| self.token_drop(t)).collect();
                let mut rest = label.drop.clone();
                let mut cur = Vec::new();
                multisets(&tokens, &drops, 0, &mut rest, &mut cur, &mut out, self.cap)?;
            }
        }
        Ok(out)
    }

    pub fn gram_block(&self, label: &BlockLabel) -> Result<GramBlock> {
        let words = self.block_words(label)?;
        let ev = self.evaluator();
        let n = words.len();
        let mut matrix = vec![vec![Scalar::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = ev.form(&words[i], &words[j])?;
                matrix[j][i] = v.conj();
                matrix[i][j] = v;
            }
        }
        let verdict = psd_verdict(&matrix)?;
        let kernel = kernel_basis(&matrix);
        let degree = (self.mode == Mode::StandardBorel).then(|| -label.drop[0]);
        let exact = self.exact && matrix.iter().flatten().all(Scalar::is_exact);
        Ok(GramBlock {
            drop: label.drop.clone(),
            degree,
            window: label.window,
            words,
            matrix,
            verdict,
            exact,
            kernel,
        })
    }
}

fn cap_error(cap: usize) -> KmxError {
    KmxError::Resource(format!("block has more than {cap} words"))
}

fn permutations(
    counts: &mut [i64],
    cur: &mut Vec<usize>,
    total: usize,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    if cur.len() == total {
        if out.len() >= cap {
            return Err(cap_error(cap));
        }
        out.push(cur.clone());
        return Ok(());
    }
    for i in 0..counts.len() {
        if counts[i] > 0 {
            counts[i] -= 1;
            cur.push(i);
            permutations(counts, cur, total, out, cap)?;
            cur.pop();
            counts[i] += 1;
        }
    }
    Ok(())
}

fn multisets(
    tokens: &[Token],
    drops: &[Vec<i64>],
    start: usize,
    rest: &mut [i64],
    cur: &mut Word,
    out: &mut Vec<Word>,
    cap: usize,
) -> Result<()> {
    if rest.iter().all(|&k| k == 0) {
        if out.len() >= cap {
            return Err(cap_error(cap));
        }
        out.push(cur.clone());
        return Ok(());
    }
    for i in start..tokens.len() {
        if drops[i].iter().zip(rest.iter()).all(|(a, b)| a <= b) {
            for (r, a) in rest.iter_mut().zip(&drops[i]) {
                *r -= a;
            }
            cur.push(tokens[i]);
            multisets(tokens, drops, i, rest, cur, out, cap)?;
            cur.pop();
            for (r, a) in rest.iter_mut().zip(&drops[i]) {
                *r += a;
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum PTerm {
    Loop(i64, usize),
    C,
    D,
}

/// Memoizing evaluator for one context; not shared across threads.
pub struct Evaluator<'a> {
    ctx: &'a FormContext,
    form_cache: RefCell<HashMap<(Word, Word), Scalar>>,
    act_cache: RefCell<HashMap<(PTerm, Word), Comb>>,
}

impl Evaluator<'_> {
    /// `H(u, w)`.
    pub fn form(&self, u: &[Token], w: &[Token]) -> Result<Scalar> {
        if w.is_empty() {
            return Ok(if u.is_empty() { Scalar::one() } else { Scalar::zero() });
        }
        if self.ctx.word_drop(u) != self.ctx.word_drop(w) {
            return Ok(Scalar::zero());
        }
        let key = (u.to_vec(), w.to_vec());
        if let Some(v) = self.form_cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let raised = self.act(&self.omega_of_token(&w[0])?, u)?;
        let mut acc = Scalar::zero();
        for (word, c) in &raised {
            let f = self.form(word, &w[1..])?;
            if !f.is_zero() {
                acc += &(c * &f);
            }
        }
        self.form_cache.borrow_mut().insert(key, acc.clone());
        Ok(acc)
    }

    fn omega_of_token(&self, t: &Token) -> Result<Action> {
        match (t, &self.ctx.route) {
            (Token::F(i), Route::Generators(d)) => {
                Ok(Action::Gen(Gen::E(*i), Scalar::from_int(d.signs[*i])))
            }
            (Token::Z { deg, basis }, Route::Loop(_)) => Ok(Action::Loop(
                self.ctx.apply_omega(&LoopElement::term(*deg, *basis, Scalar::one()))?,
            )),
            _ => Err(KmxError::Unsupported("token does not match the context route".into())),
        }
    }

    /// `x . (word v)` as a combination of words.
    pub fn act(&self, x: &Action, word: &[Token]) -> Result<Comb> {
        match (x, &self.ctx.route) {
            (Action::Gen(g, c), Route::Generators(d)) => {
                let mut out = Comb::new();
                match *g {
                    Gen::F(i) => {
                        let mut w = vec![Token::F(i)];
                        w.extend_from_slice(word);
                        comb_add(&mut out, w, c.clone());
                    }
                    Gen::H(i) => {
                        let v = self.h_eigenvalue(d, i, word);
                        comb_add(&mut out, word.to_vec(), c * &v);
                    }
                    Gen::E(i) => {
                        for k in 0..word.len() {
                            if word[k] != Token::F(i) {
                                continue;
                            }
                            let v = self.h_eigenvalue(d, i, &word[k + 1..]);
                            let mut w = word[..k].to_vec();
                            w.extend_from_slice(&word[k + 1..]);
                            comb_add(&mut out, w, c * &v);
                        }
                    }
                }
                Ok(out)
            }
            (Action::Loop(x), Route::Loop(d)) => self.act_loop(d, x, word),
            _ => Err(KmxError::Unsupported("action does not match the context route".into())),
        }
    }

    /// `(Lambda - drop(word))(h_i)` on the generators route.
    fn h_eigenvalue(&self, d: &GeneratorData, i: usize, word: &[Token]) -> Scalar {
        let mut v = d.lambda[i].clone();
        for t in word {
            if let Token::F(j) = t {
                v -= &Scalar::from_int(d.gcm.get(i, *j));
            }
        }
        v
    }

    fn act_loop(&self, d: &LoopData, x: &LoopElement, word: &[Token]) -> Result<Comb> {
        let mut out = Comb::new();
        for (&(deg, b), c) in x.terms() {
            if d.in_p(deg, b) {
                let r = self.act_p(d, PTerm::Loop(deg, b), word)?;
                comb_axpy(&mut out, c, &r);
            } else {
                let mut w = vec![Token::Z { deg, basis: b }];
                w.extend_from_slice(word);
                comb_add(&mut out, w, c.clone());
            }
        }
        for (coeff, term) in [(x.c_coeff(), PTerm::C), (x.d_coeff(), PTerm::D)] {
            if !coeff.is_zero() {
                let r = self.act_p(d, term, word)?;
                comb_axpy(&mut out, coeff, &r);
            }
        }
        Ok(out)
    }

    fn lambda_p(&self, d: &LoopData, p: PTerm) -> Scalar {
        match p {
            PTerm::C => d.c_value.clone(),
            PTerm::D => d.d_value.clone(),
            PTerm::Loop(deg, b) => match d.aff.finite().kind(b) {
                Basis::H(j) => (d.lambda_h)(deg, j),
                _ => Scalar::zero(),
            },
        }
    }

    fn act_p(&self, d: &LoopData, p: PTerm, word: &[Token]) -> Result<Comb> {
        if word.is_empty() {
            let mut out = Comb::new();
            comb_add(&mut out, Vec::new(), self.lambda_p(d, p));
            return Ok(out);
        }
        let key = (p, word.to_vec());
        if let Some(v) = self.act_cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let Token::Z { deg, basis } = word[0] else {
            return Err(KmxError::Unsupported("generator token on the loop route".into()));
        };
        let rest = &word[1..];
        let pel = match p {
            PTerm::Loop(k, b) => LoopElement::term(k, b, Scalar::one()),
            PTerm::C => LoopElement::central(Scalar::one()),
            PTerm::D => LoopElement::derivation(Scalar::one()),
        };
        let br = d.aff.bracket(&pel, &LoopElement::term(deg, basis, Scalar::one()));
        let mut out = self.act_loop(d, &br, rest)?;
        let tail = self.act_p(d, p, rest)?;
        for (w, c) in tail {
            let mut nw = vec![word[0]];
            nw.extend(w);
            comb_add(&mut out, nw, c);
        }
        self.act_cache.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    /// `Lambda(beta(x_1 x_2 .. x_r))`: apply `x_r` first to `v` and read
    /// the coefficient of `v`.
    pub fn lambda_beta(&self, factors: &[Action]) -> Result<Scalar> {
        let mut state = Comb::new();
        comb_add(&mut state, Vec::new(), Scalar::one());
        for x in factors.iter().rev() {
            let mut next = Comb::new();
            for (w, c) in &state {
                let r = self.act(x, w)?;
                comb_axpy(&mut next, c, &r);
            }
            state = next;
        }
        Ok(state.get(&Vec::new()).cloned().unwrap_or_default())
    }
}

/// How `omega` acts on the finite algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmegaKind {
    /// `E_xi <-> F_xi`, `h` fixed: the compact form.
    Compact,
    /// `E_xi <-> s(xi) F_xi` with `s = -1` on the noncompact roots of
    /// `su(n,1)` (node 1 noncompact).
    SignTwisted,
    /// `X -> S X^* S` through the defining representation of `A_n`.
    Matrix,
}

/// `omega_dot` on every basis element of the finite algebra.
pub fn omega_table(alg: &FiniteAlgebra, kind: OmegaKind) -> Result<Vec<Element>> {
    let single = |b: usize, s: i64| -> Element {
        let mut e = Element::new();
        e.insert(b, Scalar::from_int(s));
        e
    };
    match kind {
        OmegaKind::Compact | OmegaKind::SignTwisted => {
            let split = match kind {
                OmegaKind::SignTwisted => {
                    let l = alg.rank();
                    if alg.gcm().entries() != crate::catalog::finite_matrix('A', l)?.as_slice() {
                        return Err(KmxError::Unsupported(
                            "the sign-twisted omega is defined for su(n,1) only".into(),
                        ));
                    }
                    Some(split_for(alg, 0))
                }
                _ => None,
            };
            let sign = |r: usize| split.as_ref().map_or(1, |s| s.sign(r));
            Ok((0..alg.dim())
                .map(|b| match alg.kind(b) {
                    Basis::H(_) => single(b, 1),
                    Basis::E(r) => single(alg.f_root(r), sign(r)),
                    Basis::F(r) => single(alg.e_root(r), sign(r)),
                })
                .collect())
        }
        OmegaKind::Matrix => {
            let real = MatrixRealization::new(alg)?;
            (0..alg.dim())
                .map(|b| real.element_of(alg, &su_n1_star(real.basis_matrix(b))))
                .collect()
        }
    }
}

#[cfg(test)]
mod oracle;
#[cfg(test)]
mod tests;

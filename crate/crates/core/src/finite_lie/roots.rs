use std::cmp::Reverse;
use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::cartan::{Gcm, GcmClass};
use crate::error::{KmxError, Result};

/// A root in simple-root coordinates `(k_1, .., k_l)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root(pub Vec<i64>);

impl Root {
    pub fn simple(rank: usize, i: usize) -> Root {
        let mut v = vec![0; rank];
        v[i] = 1;
        Root(v)
    }

    pub fn zero(rank: usize) -> Root {
        Root(vec![0; rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&k| k >= 0) && self.0.iter().any(|&k| k > 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// `self(h_i) = sum_m k_m A_im`.
    pub fn pair_coroot(&self, gcm: &Gcm, i: usize) -> i64 {
        self.0.iter().enumerate().map(|(m, &k)| k * gcm.get(i, m)).sum()
    }

    pub fn reflect(&self, gcm: &Gcm, i: usize) -> Root {
        let c = self.pair_coroot(gcm, i);
        let mut v = self.0.clone();
        v[i] -= c;
        Root(v)
    }

    /// Compact label used in basis names, e.g. `"101"`; coordinates are
    /// separated by commas once any exceeds one digit.
    pub fn label(&self) -> String {
        if self.0.iter().all(|&k| (0..10).contains(&k)) {
            self.0.iter().map(|k| k.to_string()).collect()
        } else {
            self.0.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse_label(s: &str, rank: usize) -> Option<Root> {
        let v: Vec<i64> = if s.contains(',') {
            s.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?
        } else {
            s.chars().map(|c| c.to_digit(10).map(i64::from)).collect::<Option<_>>()?
        };
        (v.len() == rank).then_some(Root(v))
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &k) in self.0.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(format!("a{}", i + 1)),
                -1 => parts.push(format!("-a{}", i + 1)),
                _ => parts.push(format!("{}a{}", k, i + 1)),
            }
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join("+").replace("+-", "-"))
    }
}

impl Add for &Root {
    type Output = Root;
    fn add(self, o: &Root) -> Root {
        Root(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Root {
    type Output = Root;
    fn sub(self, o: &Root) -> Root {
        Root(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Root {
    type Output = Root;
    fn neg(self) -> Root {
        Root(self.0.iter().map(|a| -a).collect())
    }
}

/// Ordering key: height first, then reverse-lexicographic coordinates, so
/// that `a1 < a2 < ... < al` among the simple roots.
pub(crate) fn root_order_key(r: &Root) -> (i64, Reverse<Vec<i64>>) {
    (r.height(), Reverse(r.0.clone()))
}

/// All roots of the finite root system, closed under every simple
/// reflection, sorted by height and then by [`root_order_key`].
pub fn generate_roots(gcm: &Gcm) -> Result<Vec<Root>> {
    if gcm.class() != GcmClass::Finite {
        return Err(KmxError::Rejected(format!(
            "root generation needs a Finite Cartan matrix, got {} ({})",
            gcm,
            gcm.class()
        )));
    }
    let l = gcm.n();
    let mut seen: HashSet<Root> = HashSet::new();
    let mut stack: Vec<Root> = (0..l).map(|i| Root::simple(l, i)).collect();
    while let Some(r) = stack.pop() {
        if !seen.insert(r.clone()) {
            continue;
        }
        for i in 0..l {
            let s = r.reflect(gcm, i);
            if !seen.contains(&s) {
                stack.push(s);
            }
        }
    }
    let mut roots: Vec<Root> = seen.into_iter().collect();
    roots.sort_by_key(root_order_key);
    Ok(roots)
}

pub fn positive_roots(gcm: &Gcm) -> Result<Vec<Root>> {
    Ok(generate_roots(gcm)?.into_iter().filter(Root::is_positive).collect())
}

/// Unique positive root of maximal height.
pub fn highest_root(roots: &[Root]) -> Option<Root> {
    roots.iter().filter(|r| r.is_positive()).max_by_key(|r| r.height()).cloned()
}

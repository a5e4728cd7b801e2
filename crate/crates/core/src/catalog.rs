//! Named Cartan matrices.
//!
//! Classical families use Bourbaki node numbering under the convention
//! `A[j][k] = alpha_k(h_j)`. A trailing `~` (e.g. `"A1~"`) requests the
//! untwisted affine extension; `"su(n,1)"` is an alias for `A_n`.

use crate::cartan::Gcm;
use crate::error::{KmxError, Result};

/// What a catalog name resolved to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogEntry {
    Finite { name: String, gcm: Gcm },
    Affine { name: String, finite: Gcm },
    SuN1 { n: usize, gcm: Gcm },
}

impl CatalogEntry {
    pub fn finite_gcm(&self) -> &Gcm {
        match self {
            CatalogEntry::Finite { gcm, .. } | CatalogEntry::SuN1 { gcm, .. } => gcm,
            CatalogEntry::Affine { finite, .. } => finite,
        }
    }
}

fn type_a(n: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; n]; n];
    for i in 0..n {
        m[i][i] = 2;
        if i + 1 < n {
            m[i][i + 1] = -1;
            m[i + 1][i] = -1;
        }
    }
    m
}

pub fn finite_matrix(family: char, rank: usize) -> Result<Vec<Vec<i64>>> {
    let unknown = || KmxError::Rejected(format!("unknown catalog name {family}{rank}"));
    let m = match (family, rank) {
        ('A', 1..=9) => type_a(rank),
        ('B', 2..=4) => {
            let mut m = type_a(rank);
            m[rank - 1][rank - 2] = -2;
            m
        }
        ('C', 2..=4) => {
            let mut m = type_a(rank);
            m[rank - 2][rank - 1] = -2;
            m
        }
        ('D', 4) => vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, -1],
            vec![0, -1, 2, 0],
            vec![0, -1, 0, 2],
        ],
        ('G', 2) => vec![vec![2, -1], vec![-3, 2]],
        _ => return Err(unknown()),
    };
    Ok(m)
}

/// Resolves `"A1".."A9"`, `"B2".."B4"`, `"C2".."C4"`, `"D4"`, `"G2"`, any of
/// those with a `~` suffix, and `"su(n,1)"`.
pub fn resolve(name: &str) -> Result<CatalogEntry> {
    let name = name.trim();
    if let Some(inner) = name.strip_prefix("su(").and_then(|s| s.strip_suffix(",1)")) {
        let n: usize = inner
            .trim()
            .parse()
            .map_err(|_| KmxError::Rejected(format!("unknown catalog name {name}")))?;
        if n < 1 {
            return Err(KmxError::Rejected("su(n,1) requires n >= 1".into()));
        }
        return Ok(CatalogEntry::SuN1 { n, gcm: Gcm::new(type_a(n))? });
    }
    let (base, affine) = match name.strip_suffix('~') {
        Some(b) => (b, true),
        None => (name, false),
    };
    let mut chars = base.chars();
    let family = chars.next().ok_or_else(|| KmxError::Rejected("empty catalog name".into()))?;
    let rank: usize = chars
        .as_str()
        .parse()
        .map_err(|_| KmxError::Rejected(format!("unknown catalog name {name}")))?;
    let gcm = Gcm::new(finite_matrix(family, rank)?)?;
    Ok(if affine {
        CatalogEntry::Affine { name: name.to_string(), finite: gcm }
    } else {
        CatalogEntry::Finite { name: name.to_string(), gcm }
    })
}

/// Catalog finite algebras and their dimensions.
pub fn catalog_dimensions() -> Vec<(&'static str, usize)> {
    let mut v: Vec<(&'static str, usize)> = vec![
        ("A1", 3),
        ("A2", 8),
        ("A3", 15),
        ("A4", 24),
        ("A5", 35),
        ("A6", 48),
        ("A7", 63),
        ("A8", 80),
        ("A9", 99),
    ];
    v.extend([
        ("B2", 10),
        ("B3", 21),
        ("B4", 36),
        ("C2", 10),
        ("C3", 21),
        ("C4", 36),
        ("D4", 28),
        ("G2", 14),
    ]);
    v
}

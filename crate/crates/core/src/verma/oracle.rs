//! Brute-force PBW normal ordering in `U(sl2)` with `f < h < e`.

use std::collections::BTreeMap;

const F: u8 = 0;
const H: u8 = 1;
const E: u8 = 2;

type Poly = BTreeMap<Vec<u8>, i128>;

fn add(p: &mut Poly, w: Vec<u8>, c: i128) {
    if c == 0 {
        return;
    }
    let e = p.entry(w.clone()).or_insert(0);
    *e += c;
    if *e == 0 {
        p.remove(&w);
    }
}

/// Rewrite adjacent inversions until every word reads `f^a h^b e^c`.
fn normal_order(mut p: Poly) -> Poly {
    let mut done = Poly::new();
    while let Some((w, c)) = p.pop_first() {
        let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) else {
            add(&mut done, w, c);
            continue;
        };
        let mut swapped = w.clone();
        swapped.swap(i, i + 1);
        add(&mut p, swapped, c);
        // [x, y] for the inverted pair x y.
        let (comm, k): (Vec<u8>, i128) = match (w[i], w[i + 1]) {
            (E, F) => (vec![H], 1),
            (E, H) => (vec![E], -2),
            (H, F) => (vec![F], -2),
            _ => unreachable!(),
        };
        let mut nw = w[..i].to_vec();
        nw.extend(comm);
        nw.extend_from_slice(&w[i + 2..]);
        add(&mut p, nw, c * k);
    }
    done
}

/// `<e^k f^k v, v>` on the Verma module of highest weight `m`: the pure-`h`
/// part of `e^k f^k` evaluated at `h = m`.
pub fn sl2_norm(m: i128, k: usize) -> i128 {
    let mut w = vec![E; k];
    w.extend(vec![F; k]);
    let mut p = Poly::new();
    p.insert(w, 1);
    normal_order(p)
        .into_iter()
        .filter(|(w, _)| w.iter().all(|&x| x == H))
        .map(|(w, c)| c * m.pow(w.len() as u32))
        .sum()
}

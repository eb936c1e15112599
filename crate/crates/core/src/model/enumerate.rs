use rand::Rng;
use rustc_hash::FxHashMap;

use super::{isomorphic, ModelBuilder, StratifiedModel, Valuation};
use crate::formula::Modality;

/// Strict partial orders on `0..m` contained in the natural order.
fn sub_orders(m: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let rel: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(k, _)| (mask >> k) & 1 == 1).map(|(_, &p)| p).collect();
        let has = |a: usize, b: usize| rel.contains(&(a, b));
        let transitive = rel.iter().all(|&(a, b)| (0..m).all(|c| !has(b, c) || has(a, c)));
        if transitive {
            out.push(rel);
        }
    }
    out
}

fn connected(m: usize, rel: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in rel {
            for (u, v) in [(a, b), (b, a)] {
                if u == x && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn go(i: usize, maxv: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=maxv + 1 {
            cur[i] = v;
            go(i + 1, maxv.max(v), cur, out);
        }
    }
    if n > 0 {
        go(1, 0, &mut cur, &mut out);
    }
    out
}

fn invariant(m: &StratifiedModel) -> Vec<(usize, usize, usize, usize, bool)> {
    let n = m.len();
    let mut v: Vec<_> = (0..n)
        .map(|x| {
            let indeg = |md| (0..n).filter(|&y| m.related(md, y, x)).count();
            (
                m.successors(Modality::Zero, x).count_ones(..),
                m.successors(Modality::One, x).count_ones(..),
                indeg(Modality::Zero),
                indeg(Modality::One),
                x == m.root(),
            )
        })
        .collect();
    v.sort_unstable();
    v
}

/// All rooted stratified frames with exactly `n` worlds, up to isomorphism,
/// with every valuation empty.
pub fn rooted_frames(n: usize) -> Vec<StratifiedModel> {
    let mut buckets: FxHashMap<Vec<(usize, usize, usize, usize, bool)>, Vec<StratifiedModel>> =
        FxHashMap::default();
    let mut order = Vec::new();
    let orders_cache: Vec<Vec<Vec<(usize, usize)>>> = (0..=n).map(sub_orders).collect();
    for part in set_partitions(n) {
        // Worlds must be grouped by sheet in index order.
        if part.windows(2).any(|w| w[1] < w[0]) {
            continue;
        }
        let k = part.iter().max().map_or(0, |m| m + 1);
        let members: Vec<Vec<usize>> = (0..k).map(|s| (0..n).filter(|&x| part[x] == s).collect()).collect();
        let inner: Vec<Vec<&Vec<(usize, usize)>>> = members
            .iter()
            .enumerate()
            .map(|(s, ws)| {
                orders_cache[ws.len()]
                    .iter()
                    .filter(|rel| {
                        if s == 0 {
                            (1..ws.len()).all(|j| rel.contains(&(0, j)))
                        } else {
                            connected(ws.len(), rel)
                        }
                    })
                    .collect()
            })
            .collect();
        let upper_orders = &orders_cache[k.saturating_sub(1)];
        for up in upper_orders {
            let mut choice = vec![0usize; k];
            loop {
                let mut b = ModelBuilder::new();
                let sheets: Vec<usize> = (0..k).map(|_| b.add_sheet()).collect();
                for x in 0..n {
                    b.add_world(sheets[part[x]], 0);
                }
                for t in 1..k {
                    b.below(0, t);
                }
                for &(a, c) in up {
                    b.below(a + 1, c + 1);
                }
                for s in 0..k {
                    for &(i, j) in inner[s][choice[s]] {
                        b.r1(members[s][i], members[s][j]);
                    }
                }
                let m = b.build(0).expect("enumerated frame is rooted");
                let key = invariant(&m);
                let bucket = buckets.entry(key.clone()).or_default();
                if !bucket.iter().any(|o| isomorphic(o, &m)) {
                    bucket.push(m.clone());
                    order.push(m);
                }
                // odometer over per-sheet choices
                let mut s = 0;
                while s < k {
                    choice[s] += 1;
                    if choice[s] < inner[s].len() {
                        break;
                    }
                    choice[s] = 0;
                    s += 1;
                }
                if s == k {
                    break;
                }
            }
        }
    }
    order
}

/// Every rooted stratified model with at most `max_worlds` worlds over `nvars`
/// variables: each frame up to isomorphism, under every valuation.
pub fn all_rooted_models(max_worlds: usize, nvars: usize) -> Vec<StratifiedModel> {
    let mut out = Vec::new();
    for n in 1..=max_worlds {
        for frame in rooted_frames(n) {
            let bits = n * nvars;
            assert!(bits < 40, "valuation space too large");
            for code in 0u64..(1u64 << bits) {
                let val: Vec<Valuation> =
                    (0..n).map(|x| (code >> (x * nvars)) & ((1u64 << nvars) - 1)).collect();
                out.push(frame.with_valuations(val));
            }
        }
    }
    out
}

/// Parameters for [`random_model`].
#[derive(Clone, Copy, Debug)]
pub struct RandomModelParams {
    pub max_worlds: usize,
    pub max_sheets: usize,
    pub nvars: usize,
    /// Probability of each optional edge.
    pub edge_prob: f64,
}

impl Default for RandomModelParams {
    fn default() -> Self {
        RandomModelParams { max_worlds: 6, max_sheets: 4, nvars: 2, edge_prob: 0.5 }
    }
}

/// A random rooted stratified model; world 0 is the root.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, p: &RandomModelParams) -> StratifiedModel {
    let n = rng.gen_range(1..=p.max_worlds.max(1));
    let k = rng.gen_range(1..=n.min(p.max_sheets.max(1)));
    let mut sheet_of: Vec<usize> = (0..n).map(|x| if x < k { x } else { rng.gen_range(0..k) }).collect();
    sheet_of[0] = 0;
    let mut b = ModelBuilder::new();
    let sheets: Vec<usize> = (0..k).map(|_| b.add_sheet()).collect();
    let mask = if p.nvars >= 64 { u64::MAX } else { (1u64 << p.nvars) - 1 };
    for &s in &sheet_of {
        let v: u64 = rng.gen::<u64>() & mask;
        b.add_world(sheets[s], v);
    }
    for t in 1..k {
        b.below(0, t);
        for u in t + 1..k {
            if rng.gen_bool(p.edge_prob) {
                b.below(t, u);
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if sheet_of[x] != sheet_of[y] {
                continue;
            }
            if (x == 0 && sheet_of[y] == 0) || rng.gen_bool(p.edge_prob) {
                b.r1(x, y);
            }
        }
    }
    b.build(0).expect("random construction is rooted at world 0")
}

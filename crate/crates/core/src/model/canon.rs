use rustc_hash::FxHashMap;

use super::{ModelBuilder, StratifiedModel};
use crate::error::{Error, Result};
use crate::formula::Modality;

/// Colour refinement over a family of (model, world subset) pairs with a shared palette.
fn refine(parts: &[(&StratifiedModel, &[usize], Option<usize>)]) -> Vec<Vec<usize>> {
    let mut colours: Vec<Vec<usize>> = Vec::new();
    let mut palette: FxHashMap<Vec<u64>, usize> = FxHashMap::default();
    for (m, ws, point) in parts {
        let c = ws
            .iter()
            .map(|&x| {
                let key = vec![m.valuation(x), (Some(x) == *point) as u64];
                let k = palette.len();
                *palette.entry(key).or_insert(k)
            })
            .collect();
        colours.push(c);
    }
    let mut classes = palette.len();
    loop {
        let mut next_palette: FxHashMap<Vec<u64>, usize> = FxHashMap::default();
        let mut next = Vec::new();
        for (pi, (m, ws, _)) in parts.iter().enumerate() {
            let pos: FxHashMap<usize, usize> = ws.iter().enumerate().map(|(i, &x)| (x, i)).collect();
            let mut c = Vec::with_capacity(ws.len());
            for &x in ws.iter() {
                let mut key = vec![colours[pi][pos[&x]] as u64];
                for m_ in Modality::BOTH {
                    for forward in [true, false] {
                        let mut neigh: Vec<u64> = ws
                            .iter()
                            .filter(|&&y| {
                                if forward {
                                    m.related(m_, x, y)
                                } else {
                                    m.related(m_, y, x)
                                }
                            })
                            .map(|y| colours[pi][pos[y]] as u64)
                            .collect();
                        neigh.sort_unstable();
                        key.push(u64::MAX);
                        key.extend(neigh);
                    }
                }
                let k = next_palette.len();
                c.push(*next_palette.entry(key).or_insert(k));
            }
            next.push(c);
        }
        colours = next;
        if next_palette.len() == classes {
            return colours;
        }
        classes = next_palette.len();
    }
}

fn iso_search(
    a: &StratifiedModel,
    wa: &[usize],
    b: &StratifiedModel,
    wb: &[usize],
    ca: &[usize],
    cb: &[usize],
) -> bool {
    let n = wa.len();
    // Assign worlds of `a` in order of increasing colour-class size.
    let mut class_size: FxHashMap<usize, usize> = FxHashMap::default();
    for &c in ca {
        *class_size.entry(c).or_default() += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (class_size[&ca[i]], ca[i], i));
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];

    fn consistent(
        a: &StratifiedModel,
        wa: &[usize],
        b: &StratifiedModel,
        wb: &[usize],
        assigned: &[Option<usize>],
        i: usize,
        j: usize,
    ) -> bool {
        for (k, slot) in assigned.iter().enumerate() {
            let Some(l) = *slot else { continue };
            for m in Modality::BOTH {
                if a.related(m, wa[i], wa[k]) != b.related(m, wb[j], wb[l])
                    || a.related(m, wa[k], wa[i]) != b.related(m, wb[l], wb[j])
                {
                    return false;
                }
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        depth: usize,
        order: &[usize],
        a: &StratifiedModel,
        wa: &[usize],
        b: &StratifiedModel,
        wb: &[usize],
        ca: &[usize],
        cb: &[usize],
        assigned: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let i = order[depth];
        for j in 0..wb.len() {
            if used[j] || cb[j] != ca[i] || !consistent(a, wa, b, wb, assigned, i, j) {
                continue;
            }
            assigned[i] = Some(j);
            used[j] = true;
            if go(depth + 1, order, a, wa, b, wb, ca, cb, assigned, used) {
                return true;
            }
            assigned[i] = None;
            used[j] = false;
        }
        false
    }
    go(0, &order, a, wa, b, wb, ca, cb, &mut assigned, &mut used)
}

fn iso_subsets(
    a: &StratifiedModel,
    wa: &[usize],
    pa: Option<usize>,
    b: &StratifiedModel,
    wb: &[usize],
    pb: Option<usize>,
) -> bool {
    if wa.len() != wb.len() {
        return false;
    }
    let cols = refine(&[(a, wa, pa), (b, wb, pb)]);
    let mut sa = cols[0].clone();
    let mut sb = cols[1].clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    iso_search(a, wa, b, wb, &cols[0], &cols[1])
}

/// Isomorphism of rooted models (roots must correspond).
pub fn isomorphic(a: &StratifiedModel, b: &StratifiedModel) -> bool {
    let wa: Vec<usize> = (0..a.len()).collect();
    let wb: Vec<usize> = (0..b.len()).collect();
    iso_subsets(a, &wa, Some(a.root()), b, &wb, Some(b.root()))
}

/// True iff deleting the root 1-sheet from both models leaves isomorphic remainders.
pub fn one_congruent(a: &StratifiedModel, b: &StratifiedModel) -> bool {
    iso_subsets(a, &a.residue_worlds(), None, b, &b.residue_worlds(), None)
}

/// Merges the root sheets of pairwise 1-congruent models under a fresh root
/// with empty valuation; the shared remainder is kept once.
pub fn one_sum(ms: &[StratifiedModel]) -> Result<StratifiedModel> {
    let first = ms.first().ok_or_else(|| Error::InvalidModel("1-sum of no models".into()))?;
    if ms.iter().skip(1).any(|m| !one_congruent(first, m)) {
        return Err(Error::NotOneCongruent);
    }
    let mut b = ModelBuilder::new();
    let merged = b.add_sheet();
    let root = b.add_world(merged, 0);
    let rs = first.root_sheet();
    let mut sheet_map = FxHashMap::default();
    let mut world_map = FxHashMap::default();
    for s in (0..first.sheet_count()).filter(|&s| s != rs) {
        let ns = b.add_sheet();
        sheet_map.insert(s, ns);
        b.below(merged, ns);
        for &x in first.sheet_worlds(s) {
            world_map.insert(x, b.add_world(ns, first.valuation(x)));
        }
    }
    for (&s, &ns) in &sheet_map {
        for t in 0..first.sheet_count() {
            if first.sheet_below(s, t) {
                b.below(ns, sheet_map[&t]);
            }
        }
        for &x in first.sheet_worlds(s) {
            for y in first.successors(Modality::One, x).ones() {
                b.r1(world_map[&x], world_map[&y]);
            }
        }
    }
    for m in ms {
        let mut local = FxHashMap::default();
        for &x in m.sheet_worlds(m.root_sheet()) {
            let nx = b.add_world(merged, m.valuation(x));
            local.insert(x, nx);
            b.r1(root, nx);
        }
        for &x in m.sheet_worlds(m.root_sheet()) {
            for y in m.successors(Modality::One, x).ones() {
                b.r1(local[&x], local[&y]);
            }
        }
    }
    b.build(root)
}

/// Deterministic relabelling: worlds ordered by refined colour then by index,
/// ids become `0..len()`, root first.
pub fn canonical_relabel(m: &StratifiedModel) -> StratifiedModel {
    let ws: Vec<usize> = (0..m.len()).collect();
    let cols = refine(&[(m, &ws, Some(m.root()))]).pop().expect("one part");
    let mut order: Vec<usize> = ws.clone();
    order.sort_by_key(|&x| (x != m.root(), sheet_height(m, x), cols[x], x));
    let mut b = ModelBuilder::new();
    let mut sheet_map = FxHashMap::default();
    let mut world_map = FxHashMap::default();
    for &x in &order {
        let s = m.sheet_of(x);
        let ns = *sheet_map.entry(s).or_insert_with(|| b.add_sheet());
        world_map.insert(x, b.add_world(ns, m.valuation(x)));
    }
    for &x in &order {
        for y in m.successors(Modality::One, x).ones() {
            b.r1(world_map[&x], world_map[&y]);
        }
    }
    for (&s, &ns) in &sheet_map {
        for t in 0..m.sheet_count() {
            if m.sheet_below(s, t) {
                b.below(ns, sheet_map[&t]);
            }
        }
    }
    b.build(world_map[&m.root()]).expect("relabelling preserves structure")
}

fn sheet_height(m: &StratifiedModel, x: usize) -> usize {
    (0..m.sheet_count()).filter(|&t| m.sheet_below(t, m.sheet_of(x))).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{chain0, single};

    #[test]
    fn congruence_examples() {
        let c = chain0(1, 0);
        assert!(one_congruent(&c, &c));
        assert!(one_congruent(&single(0), &single(1)));
        assert!(!one_congruent(&chain0(0, 0), &chain0(0, 1)));
        assert!(one_congruent(&chain0(1, 0), &chain0(0, 0)));
    }

    #[test]
    fn one_sum_of_single_worlds() {
        let s = one_sum(&[single(1), single(0)]).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.valuation(s.root()), 0);
        assert_eq!(s.successors(Modality::One, s.root()).count_ones(..), 2);
        assert_eq!(s.sheet_count(), 1);
    }

    #[test]
    fn one_sum_keeps_shared_residue_once() {
        let s = one_sum(&[chain0(1, 0), chain0(0, 0)]).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.sheet_count(), 2);
        assert!(one_congruent(&s, &chain0(1, 0)));
        let top = (0..s.len()).find(|&x| s.sheet_of(x) != s.root_sheet()).unwrap();
        for &x in s.sheet_worlds(s.root_sheet()) {
            assert!(s.related(Modality::Zero, x, top));
        }
    }

    #[test]
    fn one_sum_of_one_model() {
        let c = chain0(1, 0);
        let s = one_sum(std::slice::from_ref(&c)).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.valuation(s.root()), 0);
        assert!(one_sum(&[chain0(0, 1), chain0(0, 0)]).is_err());
    }

    #[test]
    fn relabelling_is_isomorphic() {
        let s = one_sum(&[chain0(1, 0), chain0(0, 0)]).unwrap();
        let r = canonical_relabel(&s);
        assert!(isomorphic(&s, &r));
        assert_eq!(r.root(), 0);
        assert!(!isomorphic(&s, &s.variant(1)));
    }
}

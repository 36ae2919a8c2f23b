use super::Pair;

fn max_vertex(pairs: &[Pair]) -> usize {
    pairs.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0)
}

const UNCOLORED: usize = usize::MAX;

struct Coloring {
    color: Vec<usize>,
    // at[v][c] = index of the edge with color c at vertex v
    at: Vec<Vec<Option<usize>>>,
}

impl Coloring {
    fn free(&self, v: usize, c: usize) -> bool {
        self.at[v].get(c).is_none_or(|e| e.is_none())
    }

    fn set(&mut self, pairs: &[Pair], e: usize, c: usize) {
        let (a, b) = pairs[e];
        for v in [a, b] {
            if self.at[v].len() <= c {
                self.at[v].resize(c + 1, None);
            }
            self.at[v][c] = Some(e);
        }
        self.color[e] = c;
    }

    fn clear(&mut self, pairs: &[Pair], e: usize) {
        let (a, b) = pairs[e];
        let c = self.color[e];
        if c == UNCOLORED {
            return;
        }
        for v in [a, b] {
            if self.at[v].get(c) == Some(&Some(e)) {
                self.at[v][c] = None;
            }
        }
    }

    /// Edges of the alternating c1/c2 path starting at `v` with color `c1`.
    fn chain(&self, pairs: &[Pair], v: usize, c1: usize, c2: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let (mut cur, mut want) = (v, c1);
        while let Some(Some(e)) = self.at[cur].get(want).copied() {
            if out.contains(&e) {
                break;
            }
            out.push(e);
            let (a, b) = pairs[e];
            cur = if a == cur { b } else { a };
            want = if want == c1 { c2 } else { c1 };
        }
        out
    }

    fn swap(&mut self, pairs: &[Pair], edges: &[usize], c1: usize, c2: usize) {
        for &e in edges {
            self.clear(pairs, e);
        }
        for &e in edges {
            let c = if self.color[e] == c1 { c2 } else { c1 };
            self.set(pairs, e, c);
        }
    }

    /// Colors edge `e = (u, v)` from the palette `0..=maxdeg` (Misra-Gries fan
    /// rotation); never needs a fresh color.
    fn fan_insert(&mut self, pairs: &[Pair], nbr: &[Vec<(usize, usize)>], e: usize, maxdeg: usize) {
        let (u, v) = pairs[e];
        let mut fan = vec![(v, e)];
        loop {
            let last = fan.last().unwrap().0;
            let next = nbr[u].iter().copied().find(|&(x, f)| {
                self.color[f] != UNCOLORED
                    && !fan.iter().any(|&(y, _)| y == x)
                    && self.free(last, self.color[f])
            });
            match next {
                Some(n) => fan.push(n),
                None => break,
            }
        }
        let c = (0..=maxdeg).find(|&c| self.free(u, c)).expect("u has a free color");
        let last = fan.last().unwrap().0;
        let d = (0..=maxdeg).find(|&d| self.free(last, d)).expect("fan end has a free color");
        if c != d {
            let path = self.chain(pairs, u, d, c);
            self.swap(pairs, &path, d, c);
        }
        // longest fan prefix ending at a vertex where d is free
        let mut w = 0;
        for i in 0..fan.len() {
            if i > 0 && !self.free(fan[i - 1].0, self.color[fan[i].1]) {
                break;
            }
            if self.free(fan[i].0, d) {
                w = i;
                break;
            }
        }
        let shifted: Vec<usize> = (1..=w).map(|j| self.color[fan[j].1]).collect();
        for &(_, f) in &fan[1..=w] {
            self.clear(pairs, f);
        }
        for (j, &c) in shifted.iter().enumerate() {
            self.set(pairs, fan[j].1, c);
        }
        self.set(pairs, fan[w].1, d);
    }

    fn count(&self, c: usize) -> usize {
        self.color.iter().filter(|&&x| x == c).count()
    }
}

/// Proper edge coloring of a simple pair list into parallel sublayers.
///
/// Misra-Gries coloring with at most `maxdeg + 1` colors, then Kempe-chain
/// recoloring to empty the last color where the alternating chain allows it,
/// then Kempe swaps along odd chains to even out sublayer sizes. Pairs keep
/// their input order inside each sublayer.
pub fn edge_color(pairs: &[Pair]) -> Vec<Vec<Pair>> {
    if pairs.is_empty() {
        return Vec::new();
    }
    let nv = max_vertex(pairs);
    let mut deg = vec![0usize; nv];
    for &(a, b) in pairs {
        deg[a] += 1;
        deg[b] += 1;
    }
    let maxdeg = deg.iter().copied().max().unwrap_or(0);
    let mut nbr = vec![Vec::new(); nv];
    for (e, &(a, b)) in pairs.iter().enumerate() {
        nbr[a].push((b, e));
        nbr[b].push((a, e));
    }
    let mut col = Coloring {
        color: vec![UNCOLORED; pairs.len()],
        at: vec![Vec::new(); nv],
    };
    for e in 0..pairs.len() {
        col.fan_insert(pairs, &nbr, e, maxdeg);
    }

    // Kempe reduction
    for e in 0..pairs.len() {
        if col.color[e] < maxdeg {
            continue;
        }
        let (u, v) = pairs[e];
        col.clear(pairs, e);
        let alpha = (0..maxdeg).find(|&c| col.free(u, c));
        let beta = (0..maxdeg).find(|&c| col.free(v, c));
        let (Some(alpha), Some(beta)) = (alpha, beta) else {
            col.set(pairs, e, col.color[e]);
            continue;
        };
        if col.free(v, alpha) {
            col.set(pairs, e, alpha);
            continue;
        }
        let chain = col.chain(pairs, v, alpha, beta);
        col.swap(pairs, &chain, alpha, beta);
        if col.free(u, alpha) && col.free(v, alpha) {
            col.set(pairs, e, alpha);
        } else {
            col.swap(pairs, &chain, alpha, beta);
            let old = col.color[e];
            col.set(pairs, e, old);
        }
    }

    let ncol = col.color.iter().max().unwrap() + 1;
    // balance sizes with chains that hold one more edge of the larger color
    for _ in 0..pairs.len() * ncol {
        let sizes: Vec<usize> = (0..ncol).map(|c| col.count(c)).collect();
        let big = (0..ncol).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap();
        let small = (0..ncol).min_by_key(|&c| (sizes[c], c)).unwrap();
        if sizes[big] <= sizes[small] + 1 {
            break;
        }
        let mut moved = false;
        for v in 0..nv {
            // chain endpoints: vertex with `big` but not `small`
            if col.free(v, small) && !col.free(v, big) {
                let chain = col.chain(pairs, v, big, small);
                if chain.len() % 2 == 1 {
                    col.swap(pairs, &chain, big, small);
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            break;
        }
    }

    let mut layers: Vec<Vec<Pair>> = vec![Vec::new(); ncol];
    for (e, &p) in pairs.iter().enumerate() {
        layers[col.color[e]].push(p);
    }
    layers.retain(|l| !l.is_empty());
    layers
}

//! CRC-aided successive-cancellation list decoding.
//!
//! Layered LLR and partial-sum arrays are shared between paths and copied
//! only when a path is about to write into an array that another path still
//! references. Path metrics use the exact update
//! `PM += ln(1 + exp(−(1 − 2û) L))`.

use super::crc::CrcSpec;
use super::sc::{g, hard, sanitize_llr, CheckNode};
use crate::channel::special::softplus;
use crate::construction::CodeSpec;

const NO_PARENT: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SclOutput {
    pub u_hat: Vec<u8>,
    /// With a CRC: whether the returned path passed it.
    pub crc_passed: Option<bool>,
}

/// Reusable list decoder for one block length and list size.
#[derive(Debug, Clone)]
pub struct SclDecoder {
    n: usize,
    list: usize,
    check: CheckNode,
    p: Vec<Vec<Vec<f64>>>,
    c: Vec<Vec<Vec<[u8; 2]>>>,
    refs: Vec<Vec<u32>>,
    free_slots: Vec<Vec<usize>>,
    slot_of: Vec<Vec<usize>>,
    active: Vec<bool>,
    free_paths: Vec<usize>,
    metric: Vec<f64>,
    head: Vec<u32>,
    trail: Vec<(u32, u8)>,
}

impl SclDecoder {
    /// Panics if `list == 0`.
    pub fn new(n: u32, list: usize, check: CheckNode) -> Self {
        assert!(list >= 1, "list size must be at least one");
        let n = n as usize;
        let layer = |l: usize| 1usize << (n - l);
        Self {
            n,
            list,
            check,
            p: (0..=n).map(|l| vec![vec![0.0; layer(l)]; list]).collect(),
            c: (0..=n)
                .map(|l| vec![vec![[0u8; 2]; layer(l)]; list])
                .collect(),
            refs: vec![vec![0; list]; n + 1],
            free_slots: vec![Vec::with_capacity(list); n + 1],
            slot_of: vec![vec![0; list]; n + 1],
            active: vec![false; list],
            free_paths: Vec::with_capacity(list),
            metric: vec![0.0; list],
            head: vec![NO_PARENT; list],
            trail: Vec::new(),
        }
    }

    pub fn list_size(&self) -> usize {
        self.list
    }

    fn reset(&mut self) {
        for l in 0..=self.n {
            self.refs[l].iter_mut().for_each(|r| *r = 0);
            self.free_slots[l].clear();
            self.free_slots[l].extend((0..self.list).rev());
        }
        self.active.iter_mut().for_each(|a| *a = false);
        self.free_paths.clear();
        self.free_paths.extend((0..self.list).rev());
        self.trail.clear();
    }

    fn new_path(&mut self) -> usize {
        let path = self.free_paths.pop().expect("free path");
        self.active[path] = true;
        for l in 0..=self.n {
            let s = self.free_slots[l].pop().expect("free slot");
            self.refs[l][s] = 1;
            self.slot_of[l][path] = s;
        }
        self.metric[path] = 0.0;
        self.head[path] = NO_PARENT;
        path
    }

    fn clone_path(&mut self, from: usize) -> usize {
        let path = self.free_paths.pop().expect("free path");
        self.active[path] = true;
        for l in 0..=self.n {
            let s = self.slot_of[l][from];
            self.slot_of[l][path] = s;
            self.refs[l][s] += 1;
        }
        self.metric[path] = self.metric[from];
        self.head[path] = self.head[from];
        path
    }

    fn kill_path(&mut self, path: usize) {
        self.active[path] = false;
        self.free_paths.push(path);
        for l in 0..=self.n {
            let s = self.slot_of[l][path];
            self.refs[l][s] -= 1;
            if self.refs[l][s] == 0 {
                self.free_slots[l].push(s);
            }
        }
    }

    /// Slot of `path` at `layer`, made private to the path.
    fn writable(&mut self, layer: usize, path: usize) -> usize {
        let s = self.slot_of[layer][path];
        if self.refs[layer][s] == 1 {
            return s;
        }
        let fresh = self.free_slots[layer].pop().expect("free slot");
        copy_array(&mut self.p[layer], s, fresh);
        copy_array(&mut self.c[layer], s, fresh);
        self.refs[layer][s] -= 1;
        self.refs[layer][fresh] = 1;
        self.slot_of[layer][path] = fresh;
        fresh
    }

    fn active_paths(&self) -> Vec<usize> {
        (0..self.list).filter(|&p| self.active[p]).collect()
    }

    fn calc_p(&mut self, layer: usize, node: usize) {
        if layer == 0 {
            return;
        }
        if node % 2 == 0 {
            self.calc_p(layer - 1, node / 2);
        }
        let m = 1usize << (self.n - layer);
        let check = self.check;
        for path in self.active_paths() {
            let prev = self.slot_of[layer - 1][path];
            let cur = self.writable(layer, path);
            let (upper, lower) = self.p.split_at_mut(layer);
            let src = &upper[layer - 1][prev];
            let dst = &mut lower[0][cur];
            if node % 2 == 0 {
                for b in 0..m {
                    dst[b] = check.combine(src[b], src[b + m]);
                }
            } else {
                let left = &self.c[layer][cur];
                for b in 0..m {
                    dst[b] = g(src[b], src[b + m], left[b][0]);
                }
            }
        }
    }

    fn update_c(&mut self, layer: usize, node: usize) {
        let parent = node / 2;
        let m = 1usize << (self.n - layer);
        for path in self.active_paths() {
            let cur = self.slot_of[layer][path];
            let prev = self.writable(layer - 1, path);
            let (upper, lower) = self.c.split_at_mut(layer);
            let dst = &mut upper[layer - 1][prev];
            let src = &lower[0][cur];
            let col = parent % 2;
            for b in 0..m {
                dst[b][col] = src[b][0] ^ src[b][1];
                dst[b + m][col] = src[b][1];
            }
        }
        if parent % 2 == 1 {
            self.update_c(layer - 1, parent);
        }
    }

    fn set_bit(&mut self, path: usize, phase: usize, bit: u8, metric: f64, record: bool) {
        let s = self.writable(self.n, path);
        self.c[self.n][s][0][phase % 2] = bit;
        self.metric[path] = metric;
        if record {
            self.trail.push((self.head[path], bit));
            self.head[path] = (self.trail.len() - 1) as u32;
        }
    }

    fn leaf_llr(&self, path: usize) -> f64 {
        self.p[self.n][self.slot_of[self.n][path]][0]
    }

    fn extend_paths(&mut self, phase: usize) {
        let paths = self.active_paths();
        // (metric, disagrees with the hard decision, path, bit)
        let mut candidates = Vec::with_capacity(2 * paths.len());
        for &path in &paths {
            let l = self.leaf_llr(path);
            let preferred = hard(l);
            for bit in 0..2u8 {
                let signed = if bit == 0 { l } else { -l };
                candidates.push((
                    self.metric[path] + softplus(-signed),
                    bit != preferred,
                    path,
                    bit,
                ));
            }
        }
        if candidates.len() > self.list {
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            candidates.truncate(self.list);
        }
        let mut keep = vec![[None::<f64>; 2]; self.list];
        for &(m, _, path, bit) in &candidates {
            keep[path][bit as usize] = Some(m);
        }
        for &path in &paths {
            if keep[path] == [None, None] {
                self.kill_path(path);
            }
        }
        for &path in &paths {
            match keep[path] {
                [Some(m0), Some(m1)] => {
                    let twin = self.clone_path(path);
                    self.set_bit(path, phase, 0, m0, true);
                    self.set_bit(twin, phase, 1, m1, true);
                }
                [Some(m0), None] => self.set_bit(path, phase, 0, m0, true),
                [None, Some(m1)] => self.set_bit(path, phase, 1, m1, true),
                [None, None] => {}
            }
        }
    }

    fn info_bits(&self, path: usize) -> Vec<u8> {
        let mut bits = Vec::new();
        let mut at = self.head[path];
        while at != NO_PARENT {
            let (parent, bit) = self.trail[at as usize];
            bits.push(bit);
            at = parent;
        }
        bits.reverse();
        bits
    }

    /// Panics if the lengths disagree with the decoder's block length.
    pub fn decode(&mut self, llr: &[f64], spec: &CodeSpec, crc: Option<&CrcSpec>) -> SclOutput {
        let len = 1usize << self.n;
        assert_eq!(llr.len(), len, "LLR length");
        assert_eq!(spec.len(), len, "code length");
        self.reset();
        let root = self.new_path();
        let s0 = self.slot_of[0][root];
        for (d, &l) in self.p[0][s0].iter_mut().zip(llr) {
            *d = sanitize_llr(l);
        }
        for phase in 0..len {
            self.calc_p(self.n, phase);
            if spec.is_frozen(phase) {
                for path in self.active_paths() {
                    let m = self.metric[path] + softplus(-self.leaf_llr(path));
                    self.set_bit(path, phase, 0, m, false);
                }
            } else {
                self.extend_paths(phase);
            }
            if phase % 2 == 1 {
                self.update_c(self.n, phase);
            }
        }

        let mut ranked = self.active_paths();
        ranked.sort_by(|&a, &b| self.metric[a].total_cmp(&self.metric[b]).then(a.cmp(&b)));
        let (winner, crc_passed) = match crc {
            Some(spec) => match ranked.iter().find(|&&p| spec.check(&self.info_bits(p))) {
                Some(&p) => (p, Some(true)),
                None => (ranked[0], Some(false)),
            },
            None => (ranked[0], None),
        };
        let mut u_hat = vec![0u8; len];
        for (pos, bit) in spec
            .info_positions()
            .into_iter()
            .zip(self.info_bits(winner))
        {
            u_hat[pos] = bit;
        }
        SclOutput { u_hat, crc_passed }
    }
}

fn copy_array<T: Copy>(arrays: &mut [Vec<T>], from: usize, to: usize) {
    if from < to {
        let (a, b) = arrays.split_at_mut(to);
        b[0].copy_from_slice(&a[from]);
    } else {
        let (a, b) = arrays.split_at_mut(from);
        a[to].copy_from_slice(&b[0]);
    }
}

/// One-shot list decoding with exact check nodes.
pub fn scl_decode(
    llr: &[f64],
    spec: &CodeSpec,
    list_size: usize,
    crc: Option<&CrcSpec>,
) -> crate::Result<SclOutput> {
    crate::error::ensure!(list_size >= 1, Argument, "list size must be at least one");
    crate::error::ensure!(
        llr.len() == spec.len(),
        Argument,
        "LLR length {} does not match N = {}",
        llr.len(),
        spec.len()
    );
    if let Some(c) = crc {
        c.validate()?;
        crate::error::ensure!(
            (c.width as usize) <= spec.k(),
            Argument,
            "CRC width {} exceeds dimension {}",
            c.width,
            spec.k()
        );
    }
    Ok(SclDecoder::new(spec.n(), list_size, CheckNode::Exact).decode(llr, spec, crc))
}

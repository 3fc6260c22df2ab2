//! Open/closed configurations over edges (bonds) or vertices (sites),
//! stored as bit vectors.

use crate::error::{Error, Result};
use crate::lattice::{EdgeId, LatticeGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitConfig {
    bits: Vec<u64>,
    len: usize,
}

impl BitConfig {
    pub fn closed(len: usize) -> Self {
        BitConfig {
            bits: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn open(len: usize) -> Self {
        let mut c = Self::closed(len);
        for i in 0..len {
            c.set(i, true);
        }
        c
    }

    /// Low 64 bits interpreted as a configuration; used by enumerations.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64);
        BitConfig {
            bits: vec![mask & mask_low(len)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let (w, b) = (i / 64, i % 64);
        if v {
            self.bits[w] |= 1 << b;
        } else {
            self.bits[w] &= !(1 << b);
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i / 64] ^= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    /// Bitwise domination: self(i) <= other(i) for every index.
    pub fn dominated_by(&self, other: &BitConfig) -> bool {
        self.len == other.len && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn xor_mask(&mut self, mask: u64) {
        assert!(self.len <= 64);
        self.bits[0] ^= mask & mask_low(self.len);
    }

    pub fn set_mask(&mut self, mask: u64) {
        assert!(self.len <= 64);
        self.bits[0] = mask & mask_low(self.len);
    }

    pub fn as_mask(&self) -> u64 {
        assert!(self.len <= 64);
        self.bits[0]
    }
}

fn mask_low(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Per-edge open/closed assignment ω ∈ {0,1}^E.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BondConfig(pub BitConfig);

/// Per-vertex open/closed assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteConfig(pub BitConfig);

impl BondConfig {
    pub fn closed(graph: &LatticeGraph) -> Self {
        BondConfig(BitConfig::closed(graph.edge_count()))
    }

    pub fn open(graph: &LatticeGraph) -> Self {
        BondConfig(BitConfig::open(graph.edge_count()))
    }

    pub fn from_mask(mask: u64, graph: &LatticeGraph) -> Self {
        BondConfig(BitConfig::from_mask(mask, graph.edge_count()))
    }

    pub fn is_open(&self, e: EdgeId) -> bool {
        self.0.get(e.index())
    }

    pub fn set(&mut self, e: EdgeId, open: bool) {
        self.0.set(e.index(), open);
    }

    pub fn open_count(&self) -> usize {
        self.0.count_ones()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self, graph: &LatticeGraph) -> Result<()> {
        if self.len() != graph.edge_count() {
            return Err(Error::MismatchedConfig {
                expected: graph.edge_count(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

impl SiteConfig {
    pub fn closed(graph: &LatticeGraph) -> Self {
        SiteConfig(BitConfig::closed(graph.vertex_count()))
    }

    pub fn open(graph: &LatticeGraph) -> Self {
        SiteConfig(BitConfig::open(graph.vertex_count()))
    }

    pub fn is_open(&self, v: VertexId) -> bool {
        self.0.get(v.index())
    }

    pub fn set(&mut self, v: VertexId, open: bool) {
        self.0.set(v.index(), open);
    }

    pub fn check(&self, graph: &LatticeGraph) -> Result<()> {
        if self.0.len() != graph.vertex_count() {
            return Err(Error::MismatchedConfig {
                expected: graph.vertex_count(),
                got: self.0.len(),
            });
        }
        Ok(())
    }
}

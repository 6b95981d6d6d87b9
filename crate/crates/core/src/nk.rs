//! Classic NK landscapes with random neighbourhoods.
//!
//! Locus `i` contributes `tables[i][idx]` where `idx` packs the locus bit as
//! the high bit followed by its neighbours' bits in list order. Fitness is the
//! mean contribution, so it stays in `[0, 1]`.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Error, Result};
use crate::rng;

/// Neighbourhood topology of a generated landscape.
pub const TOPOLOGY_RANDOM: &str = "random";

#[derive(Debug, Clone, PartialEq)]
pub struct NkLandscape {
    n: usize,
    k: usize,
    neighbors: Vec<Vec<usize>>,
    tables: Vec<Vec<f64>>,
    seed: u64,
}

/// Draws an NK landscape: `k` distinct random neighbours per locus and i.i.d.
/// uniform contributions.
pub fn generate_nk(n: usize, k: usize, seed: u64) -> Result<NkLandscape> {
    if n == 0 || n > 64 {
        return Err(invalid_param(format!("NK landscapes need 1 <= N <= 64, got {n}")));
    }
    if k >= n {
        return Err(invalid_param(format!("K must satisfy 0 <= K <= N-1, got K={k}, N={n}")));
    }
    let mut rng = rng::stream(seed);
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            index::sample(&mut rng, n - 1, k)
                .into_iter()
                .map(|j| if j >= i { j + 1 } else { j })
                .collect()
        })
        .collect();
    let tables = (0..n)
        .map(|_| (0..1usize << (k + 1)).map(|_| rng.random::<f64>()).collect())
        .collect();
    Ok(NkLandscape { n, k, neighbors, tables, seed })
}

impl NkLandscape {
    pub fn new(
        n: usize,
        k: usize,
        neighbors: Vec<Vec<usize>>,
        tables: Vec<Vec<f64>>,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || n > 64 || k >= n {
            return Err(invalid_param(format!("invalid NK shape N={n}, K={k}")));
        }
        if neighbors.len() != n || tables.len() != n {
            return Err(Error::InvalidInput("need one neighbour list and table per locus".into()));
        }
        for (i, nb) in neighbors.iter().enumerate() {
            let mut sorted = nb.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if nb.len() != k || sorted.len() != k || nb.contains(&i) || nb.iter().any(|&j| j >= n)
            {
                return Err(Error::InvalidInput(format!(
                    "locus {} needs {k} distinct neighbours other than itself",
                    i + 1
                )));
            }
        }
        for (i, t) in tables.iter().enumerate() {
            if t.len() != 1 << (k + 1) || t.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidInput(format!(
                    "table of locus {} must hold 2^(K+1) values in [0, 1]",
                    i + 1
                )));
            }
        }
        Ok(Self { n, k, neighbors, tables, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    /// Table index of locus `i` for the bit string `bits` (bit `j` = `y_{j+1}`).
    #[inline]
    pub fn table_index(&self, i: usize, bits: u64) -> usize {
        let mut idx = (bits >> i & 1) as usize;
        for &j in &self.neighbors[i] {
            idx = idx << 1 | (bits >> j & 1) as usize;
        }
        idx
    }

    /// Contribution of locus `i`.
    pub fn contribution(&self, i: usize, bits: u64) -> f64 {
        self.tables[i][self.table_index(i, bits)]
    }

    /// Mean contribution over loci.
    pub fn evaluate_bits(&self, bits: u64) -> f64 {
        (0..self.n).map(|i| self.contribution(i, bits)).sum::<f64>() / self.n as f64
    }

    pub fn evaluate(&self, y: &crate::walsh::BitString) -> Result<f64> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: y.len() });
        }
        Ok(self.evaluate_bits(y.bits()))
    }

    /// Loci whose contribution depends on locus `j` (itself included).
    pub fn dependents(&self, j: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| i == j || self.neighbors[i].contains(&j))
            .collect()
    }
}

/// Mean of per-locus contributions for bit string `y`.
pub fn evaluate_nk(landscape: &NkLandscape, y: &crate::walsh::BitString) -> Result<f64> {
    landscape.evaluate(y)
}

/// JSON form. Neighbour indices are 1-based; each table is a flat array
/// indexed with the locus bit as the high bit and neighbour bits following in
/// list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NkDocument {
    pub format_version: u32,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub topology: String,
    pub neighbors: Vec<Vec<usize>>,
    pub tables: Vec<Vec<f64>>,
}

impl NkLandscape {
    pub fn to_document(&self) -> NkDocument {
        NkDocument {
            format_version: crate::model::FORMAT_VERSION,
            n: self.n,
            k: self.k,
            seed: self.seed,
            topology: TOPOLOGY_RANDOM.to_string(),
            neighbors: self
                .neighbors
                .iter()
                .map(|nb| nb.iter().map(|j| j + 1).collect())
                .collect(),
            tables: self.tables.clone(),
        }
    }

    pub fn from_document(doc: &NkDocument) -> Result<Self> {
        if doc.format_version != crate::model::FORMAT_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        let neighbors = doc
            .neighbors
            .iter()
            .map(|nb| {
                nb.iter()
                    .map(|&j| j.checked_sub(1).ok_or_else(|| Error::Malformed("neighbour indices are 1-based".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.n, doc.k, neighbors, doc.tables.clone(), doc.seed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NkDocument =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::from_document(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walsh::BitString;

    #[test]
    fn table_sizes() {
        let l0 = generate_nk(6, 0, 1).unwrap();
        assert!(l0.tables().iter().all(|t| t.len() == 2));
        assert!(l0.neighbors().iter().all(Vec::is_empty));
        let full = generate_nk(6, 5, 1).unwrap();
        assert!(full.tables().iter().all(|t| t.len() == 64));
        for (i, nb) in full.neighbors().iter().enumerate() {
            let mut s = nb.clone();
            s.sort_unstable();
            assert_eq!(s, (0..6).filter(|&j| j != i).collect::<Vec<_>>());
        }
        assert!(generate_nk(6, 6, 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_nk(10, 3, 5).unwrap(), generate_nk(10, 3, 5).unwrap());
        assert_ne!(generate_nk(10, 3, 5).unwrap(), generate_nk(10, 3, 6).unwrap());
    }

    #[test]
    fn k0_is_mean_of_single_lookups() {
        let l = generate_nk(5, 0, 9).unwrap();
        let y = BitString::from_bits(&[1, 0, 1, 1, 0]).unwrap();
        let expected: f64 = (0..5).map(|i| l.tables()[i][y.get(i) as usize]).sum::<f64>() / 5.0;
        assert_eq!(evaluate_nk(&l, &y).unwrap(), expected);
        assert!(evaluate_nk(&l, &BitString::new(4, 0).unwrap()).is_err());
    }

    #[test]
    fn table_index_puts_locus_bit_high() {
        let l = NkLandscape::new(
            3,
            2,
            vec![vec![2, 1], vec![0, 2], vec![0, 1]],
            vec![vec![0.5; 8]; 3],
            0,
        )
        .unwrap();
        // y = (1, 0, 1): locus 0 bit 1, then neighbours 2 (=1) and 1 (=0) -> 0b110
        assert_eq!(l.table_index(0, 0b101), 0b110);
        assert_eq!(l.table_index(1, 0b101), 0b011);
    }

    #[test]
    fn flips_only_touch_dependent_loci() {
        let l = generate_nk(12, 3, 4).unwrap();
        let mut touched = 0;
        for j in 0..12 {
            let deps = l.dependents(j);
            touched += deps.len();
            for bits in [0u64, 0xABC, 0xFFF] {
                let flipped = bits ^ (1 << j);
                for i in 0..12 {
                    if !deps.contains(&i) {
                        assert_eq!(l.contribution(i, bits), l.contribution(i, flipped));
                    }
                }
            }
        }
        // Each locus has K neighbours, so on average a flip touches K+1 tables.
        assert_eq!(touched, 12 * 4);
    }

    #[test]
    fn fitness_in_unit_interval() {
        let l = generate_nk(10, 4, 2).unwrap();
        for bits in 0..1024 {
            let f = l.evaluate_bits(bits);
            assert!((0.0..=1.0).contains(&f));
        }
    }

    #[test]
    fn document_round_trip_and_validation() {
        let l = generate_nk(6, 2, 3).unwrap();
        assert_eq!(NkLandscape::from_json(&l.to_json().unwrap()).unwrap(), l);
        let mut doc = l.to_document();
        doc.neighbors[0] = vec![1, 2];
        assert!(NkLandscape::from_document(&doc).is_err());
    }
}

//! Vector-quantization codebook with EMA updates and dead-code revival.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const DEFAULT_SIZE: usize = 1000;
pub const DEFAULT_DECAY: f64 = 0.99;
pub const DEFAULT_REVIVAL_PERIOD: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    k: usize,
    d: usize,
    /// Completed batches.
    pub step: u64,
    n: Vec<f64>,
    m: Vec<f64>,
    prototypes: Vec<f64>,
    pub gamma: f64,
    pub beta: f64,
    pub revival_period: u64,
    usage: Vec<u64>,
    recent: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub codes: Vec<usize>,
    pub distances: Vec<f64>,
    /// `(1 + β) · mean distance`.
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    pub assignment: Assignment,
    pub revived: Option<usize>,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Codebook {
    /// `k` random unit prototypes with accumulators `n = 1`, `m = prototype`.
    pub fn new(k: usize, d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Vec::with_capacity(k * d);
        for _ in 0..k {
            let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            m.extend(v.iter().map(|x| x / norm));
        }
        Self::from_parts(k, d, vec![1.0; k], m)
    }

    /// Codebook whose prototypes are exactly the given vectors.
    pub fn from_prototypes(protos: &[Vec<f64>]) -> Result<Self> {
        let d = protos.first().map_or(0, Vec::len);
        let mut m = Vec::with_capacity(protos.len() * d);
        for p in protos {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.len() });
            }
            m.extend_from_slice(p);
        }
        Ok(Self::from_parts(protos.len(), d, vec![1.0; protos.len()], m))
    }

    fn from_parts(k: usize, d: usize, n: Vec<f64>, m: Vec<f64>) -> Self {
        let prototypes = (0..k * d).map(|i| m[i] / n[i / d.max(1)]).collect();
        Self {
            k,
            d,
            step: 0,
            n,
            m,
            prototypes,
            gamma: DEFAULT_DECAY,
            beta: 1.0,
            revival_period: DEFAULT_REVIVAL_PERIOD,
            usage: vec![0; k],
            recent: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn prototype(&self, i: usize) -> &[f64] {
        &self.prototypes[i * self.d..(i + 1) * self.d]
    }

    pub fn accumulators(&self, i: usize) -> (f64, &[f64]) {
        (self.n[i], &self.m[i * self.d..(i + 1) * self.d])
    }

    /// Batches each code was assigned in since the last revival.
    pub fn usage(&self) -> &[u64] {
        &self.usage
    }

    /// Nearest prototype by Euclidean distance, lowest index on ties.
    pub fn nearest(&self, q: &[f64]) -> Result<(usize, f64)> {
        if q.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: q.len() });
        }
        let mut best = (0, f64::INFINITY);
        for i in 0..self.k {
            let dist = distance(q, self.prototype(i));
            if dist < best.1 {
                best = (i, dist);
            }
        }
        Ok(best)
    }

    pub fn assign(&self, queries: &[Vec<f64>]) -> Result<Assignment> {
        let mut codes = Vec::with_capacity(queries.len());
        let mut distances = Vec::with_capacity(queries.len());
        for q in queries {
            let (c, dist) = self.nearest(q)?;
            codes.push(c);
            distances.push(dist);
        }
        let loss = if queries.is_empty() {
            0.0
        } else {
            distances.iter().map(|d| d + self.beta * d).sum::<f64>() / queries.len() as f64
        };
        Ok(Assignment { codes, distances, loss })
    }

    /// `n ← γn + (1−γ)N`, `m ← γm + (1−γ)Σq`. Codes without assignments only
    /// decay, which leaves their prototype untouched.
    pub fn ema_update(&mut self, queries: &[Vec<f64>], codes: &[usize]) -> Result<()> {
        let d = self.d;
        let mut count = vec![0usize; self.k];
        let mut sum = vec![0.0; self.k * d];
        for (q, &c) in queries.iter().zip(codes) {
            if q.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: q.len() });
            }
            count[c] += 1;
            for (s, x) in sum[c * d..(c + 1) * d].iter_mut().zip(q) {
                *s += x;
            }
        }
        let (g, h) = (self.gamma, 1.0 - self.gamma);
        for i in 0..self.k {
            self.n[i] = g * self.n[i] + h * count[i] as f64;
            for j in i * d..(i + 1) * d {
                self.m[j] = g * self.m[j] + h * sum[j];
            }
            if count[i] > 0 {
                self.usage[i] += 1;
                for j in i * d..(i + 1) * d {
                    self.prototypes[j] = self.m[j] / self.n[i];
                }
            }
        }
        Ok(())
    }

    /// Replaces the lowest-index unused code with the recent query farthest from
    /// its nearest prototype, then clears usage statistics.
    pub fn revive_dead(&mut self) -> Option<usize> {
        let dead = self.usage.iter().position(|&u| u == 0);
        let revived = dead.and_then(|i| {
            let mut far: Option<(usize, f64)> = None;
            for (qi, q) in self.recent.iter().enumerate() {
                let dist = self.nearest(q).map(|(_, d)| d).unwrap_or(0.0);
                if far.is_none_or(|(_, fd)| dist > fd) {
                    far = Some((qi, dist));
                }
            }
            let (qi, _) = far?;
            let q = self.recent[qi].clone();
            let d = self.d;
            self.n[i] = 1.0;
            self.m[i * d..(i + 1) * d].copy_from_slice(&q);
            self.prototypes[i * d..(i + 1) * d].copy_from_slice(&q);
            Some(i)
        });
        self.usage.iter_mut().for_each(|u| *u = 0);
        self.recent.clear();
        revived
    }

    /// Assign, update, and revive on every `revival_period`-th batch.
    pub fn train_batch(&mut self, queries: &[Vec<f64>]) -> Result<BatchOutcome> {
        let assignment = self.assign(queries)?;
        self.ema_update(queries, &assignment.codes)?;
        self.recent.extend(queries.iter().cloned());
        self.step += 1;
        let revived = if self.revival_period > 0 && self.step % self.revival_period == 0 {
            self.revive_dead()
        } else {
            None
        };
        Ok(BatchOutcome { assignment, revived })
    }

    /// Header `K, d, step` as little-endian u64, then prototypes, `n`, `m` as little-endian f64.
    pub fn write_checkpoint(&self, w: &mut impl Write) -> Result<()> {
        for v in [self.k as u64, self.d as u64, self.step] {
            w.write_all(&v.to_le_bytes())?;
        }
        for x in self.prototypes.iter().chain(&self.n).chain(&self.m) {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_checkpoint(r: &mut impl Read) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut header = [0u64; 3];
        for h in &mut header {
            r.read_exact(&mut word)?;
            *h = u64::from_le_bytes(word);
        }
        let (k, d) = (header[0] as usize, header[1] as usize);
        let mut read = |n: usize| -> Result<Vec<f64>> {
            (0..n)
                .map(|_| {
                    r.read_exact(&mut word)?;
                    Ok(f64::from_le_bytes(word))
                })
                .collect()
        };
        let prototypes = read(k * d)?;
        let n = read(k)?;
        let m = read(k * d)?;
        let mut book = Self::from_parts(k, d, n, m);
        book.prototypes = prototypes;
        book.step = header[2];
        Ok(book)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_checkpoint(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_checkpoint(&mut std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_code_example() {
        let mut book = Codebook::from_prototypes(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        book.beta = 1.0;
        let a = book.assign(&[vec![0.4, 0.0]]).unwrap();
        assert_eq!(a.codes, vec![0]);
        assert!((a.loss - 0.8).abs() < 1e-12);
    }

    #[test]
    fn checkpoint_roundtrip() {
        let mut book = Codebook::new(8, 3, 1);
        book.train_batch(&[vec![0.1, 0.2, 0.3]]).unwrap();
        let mut buf = Vec::new();
        book.write_checkpoint(&mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 8 * (8 * 3 * 2 + 8));
        let back = Codebook::read_checkpoint(&mut buf.as_slice()).unwrap();
        assert_eq!(back.step, 1);
        for i in 0..8 {
            assert_eq!(back.prototype(i), book.prototype(i));
            assert_eq!(back.accumulators(i), book.accumulators(i));
        }
    }
}

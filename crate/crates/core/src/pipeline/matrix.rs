use std::io::Write;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};
use kodama::{linkage, Method};
use rayon::prelude::*;

use super::{compute_distance, format_value, DistanceKind};
use crate::error::{Error, Result};
use crate::metrics::CostModel;
use crate::trees::MergeTree;

/// Symmetric matrix of pairwise distances with a label per row.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    /// Row-major `n × n` values.
    pub values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.len()..(i + 1) * self.len()]
    }

    /// Rows and columns rearranged so that row `k` is the old row `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> DistanceMatrix {
        let n = self.len();
        assert_eq!(order.len(), n);
        let mut values = Vec::with_capacity(n * n);
        for &i in order {
            for &j in order {
                values.push(self.get(i, j));
            }
        }
        DistanceMatrix {
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
            values,
        }
    }

    /// CSV with a header row and a label column; values with 9 decimals.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut record = vec![self.labels[i].clone()];
            record.extend(self.row(i).iter().map(|&v| format_value(v)));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file)).map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            e => e,
        })
    }

    /// Binary 8-bit grayscale image, one pixel per entry, 0 for the smallest and 255
    /// for the largest value.
    pub fn write_pgm<W: Write>(&self, out: W) -> Result<()> {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let span = hi - lo;
        let pixels: Vec<u8> = self
            .values
            .iter()
            .map(|&v| if span > 0.0 { ((v - lo) / span * 255.0).round() as u8 } else { 0 })
            .collect();
        let n = self.len() as u32;
        PnmEncoder::new(out)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(&pixels, n, n, ExtendedColorType::L8)?;
        Ok(())
    }

    pub fn save_pgm(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_pgm(std::io::BufWriter::new(file))
    }
}

/// Distances between all pairs of trees, computed on `jobs` worker threads
/// (0 means one per available core). Each unordered pair is computed once, with the
/// earlier tree first.
pub fn compute_matrix(
    trees: &[MergeTree],
    labels: Vec<String>,
    kind: DistanceKind,
    cost: CostModel,
    jobs: usize,
) -> Result<DistanceMatrix> {
    let n = trees.len();
    if labels.len() != n {
        return Err(Error::InvalidArgument(format!("{} labels for {n} trees", labels.len())));
    }
    for (t, label) in trees.iter().zip(&labels) {
        t.validate()
            .into_result()
            .map_err(|e| Error::InvalidArgument(format!("member '{label}': {e}")))?;
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let results: Vec<f64> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| compute_distance(kind, &trees[i], &trees[j], cost))
            .collect::<Result<Vec<f64>>>()
    })?;
    let mut values = vec![0.0; n * n];
    for (&(i, j), d) in pairs.iter().zip(results) {
        values[i * n + j] = d;
        values[j * n + i] = d;
    }
    Ok(DistanceMatrix { labels, values })
}

/// Leaf order of a single-linkage dendrogram of the matrix.
pub fn cluster_order(matrix: &DistanceMatrix) -> Vec<usize> {
    let n = matrix.len();
    if n < 2 {
        return (0..n).collect();
    }
    let mut condensed: Vec<f64> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| matrix.get(i, j)).collect();
    let dendrogram = linkage(&mut condensed, n, Method::Single);
    let steps = dendrogram.steps();
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![n + steps.len() - 1];
    while let Some(c) = stack.pop() {
        if c < n {
            order.push(c);
        } else {
            let s = &steps[c - n];
            stack.push(s.cluster2);
            stack.push(s.cluster1);
        }
    }
    order
}

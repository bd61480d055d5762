//! Deduplicated enumeration of n-fold vertex sums.
//!
//! Multisets of vertex indices are walked in non-decreasing index order,
//! one stratum per smallest index, with the running sum updated in place.
//! Sums are fixed-width byte records (one byte per coordinate, so the
//! dilation must stay below 256). Small problems pack each record into a
//! `u128` and dedupe in a hash set; when the estimated set would not fit
//! the memory budget, sorted runs are spilled to temporary files and
//! merged.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Calls `sink` exactly once per distinct sum of `n` vertices (with
/// repetition) and returns the number of distinct sums. The callback order
/// is unspecified; callers must tally order-insensitively.
pub(crate) fn for_each_distinct_sum(
    vertices: &[Vec<u8>],
    dim: usize,
    n: u32,
    memory_bytes: u64,
    expected_entries: u128,
    mut sink: impl FnMut(&[u8]),
) -> Result<u64> {
    if n == 0 {
        sink(&vec![0u8; dim]);
        return Ok(1);
    }
    if vertices.is_empty() {
        return Ok(0);
    }
    debug_assert!(vertices.iter().all(|v| v.len() == dim));

    let packing = Packing::fit(dim, n);
    let per_entry = match packing {
        Some(_) => 24u128,
        None => dim as u128 + 56,
    };
    let in_memory = expected_entries.saturating_mul(per_entry) <= u128::from(memory_bytes);

    if in_memory {
        match packing {
            Some(p) => {
                let set = (0..vertices.len())
                    .into_par_iter()
                    .map(|first| {
                        let mut set = HashSet::new();
                        let mut acc = vec![0u8; dim];
                        add_assign(&mut acc, &vertices[first]);
                        walk(vertices, first, n - 1, &mut acc, &mut |sum| {
                            set.insert(p.pack(sum));
                        });
                        set
                    })
                    .reduce(HashSet::new, union_sets);
                let mut buf = vec![0u8; dim];
                for &key in &set {
                    p.unpack(key, &mut buf);
                    sink(&buf);
                }
                Ok(set.len() as u64)
            }
            None => {
                let set = (0..vertices.len())
                    .into_par_iter()
                    .map(|first| {
                        let mut set: HashSet<Box<[u8]>> = HashSet::new();
                        let mut acc = vec![0u8; dim];
                        add_assign(&mut acc, &vertices[first]);
                        walk(vertices, first, n - 1, &mut acc, &mut |sum| {
                            set.insert(sum.into());
                        });
                        set
                    })
                    .reduce(HashSet::new, union_sets);
                for key in &set {
                    sink(key);
                }
                Ok(set.len() as u64)
            }
        }
    } else {
        let chunk_records = chunk_records(memory_bytes, dim);
        let runs: Vec<File> = (0..vertices.len())
            .into_par_iter()
            .map(|first| {
                let mut writer = RunWriter::new(dim, chunk_records);
                let mut acc = vec![0u8; dim];
                add_assign(&mut acc, &vertices[first]);
                walk(vertices, first, n - 1, &mut acc, &mut |sum| {
                    writer.push(sum);
                });
                writer.finish()
            })
            .collect::<Result<Vec<Vec<File>>>>()?
            .into_iter()
            .flatten()
            .collect();
        merge_runs(runs, dim, &mut sink)
    }
}

fn union_sets<T: std::hash::Hash + Eq>(a: HashSet<T>, b: HashSet<T>) -> HashSet<T> {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    big.extend(small);
    big
}

/// Walks the multisets with indices >= `start`, `remaining` more picks,
/// invoking `emit` on the finished running sum.
fn walk(
    vertices: &[Vec<u8>],
    start: usize,
    remaining: u32,
    acc: &mut [u8],
    emit: &mut impl FnMut(&[u8]),
) {
    if remaining == 0 {
        emit(acc);
        return;
    }
    for j in start..vertices.len() {
        add_assign(acc, &vertices[j]);
        walk(vertices, j, remaining - 1, acc, emit);
        sub_assign(acc, &vertices[j]);
    }
}

fn add_assign(acc: &mut [u8], v: &[u8]) {
    for (a, &b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn sub_assign(acc: &mut [u8], v: &[u8]) {
    for (a, &b) in acc.iter_mut().zip(v) {
        *a -= b;
    }
}

/// Fixed-width bit packing of coordinate records into `u128`.
#[derive(Clone, Copy)]
struct Packing {
    bits: u32,
    dim: usize,
}

impl Packing {
    fn fit(dim: usize, n: u32) -> Option<Packing> {
        let bits = u32::BITS - n.leading_zeros();
        if (dim as u32).checked_mul(bits)? <= 128 {
            Some(Packing { bits, dim })
        } else {
            None
        }
    }

    fn pack(&self, record: &[u8]) -> u128 {
        let mut key = 0u128;
        for (i, &c) in record.iter().enumerate() {
            key |= u128::from(c) << (i as u32 * self.bits);
        }
        key
    }

    fn unpack(&self, key: u128, out: &mut [u8]) {
        let mask = (1u128 << self.bits) - 1;
        for (i, slot) in out.iter_mut().enumerate().take(self.dim) {
            *slot = ((key >> (i as u32 * self.bits)) & mask) as u8;
        }
    }
}

fn chunk_records(memory_bytes: u64, dim: usize) -> usize {
    let threads = rayon::current_num_threads().max(1) as u64;
    let per_thread = memory_bytes / (2 * threads) / dim as u64;
    per_thread.clamp(1 << 12, 1 << 23) as usize
}

/// Buffers records, spilling sorted deduplicated runs to temp files.
/// IO failures are deferred to `finish`.
struct RunWriter {
    dim: usize,
    chunk_records: usize,
    buffer: Vec<u8>,
    runs: Vec<File>,
    failed: Option<Error>,
}

impl RunWriter {
    fn new(dim: usize, chunk_records: usize) -> Self {
        RunWriter { dim, chunk_records, buffer: Vec::new(), runs: Vec::new(), failed: None }
    }

    fn push(&mut self, record: &[u8]) {
        if self.failed.is_some() {
            return;
        }
        self.buffer.extend_from_slice(record);
        if self.buffer.len() >= self.chunk_records * self.dim {
            if let Err(e) = self.flush() {
                self.failed = Some(e);
            }
        }
    }

    fn flush(&mut self) -> Result<()> {
        if self.buffer.is_empty() {
            return Ok(());
        }
        let dim = self.dim;
        let count = self.buffer.len() / dim;
        let mut order: Vec<usize> = (0..count).collect();
        let buf = &self.buffer;
        order.sort_unstable_by(|&a, &b| buf[a * dim..(a + 1) * dim].cmp(&buf[b * dim..(b + 1) * dim]));

        let mut file = tempfile::tempfile()?;
        {
            let mut w = BufWriter::new(&mut file);
            let mut last: Option<&[u8]> = None;
            for &i in &order {
                let rec = &buf[i * dim..(i + 1) * dim];
                if last != Some(rec) {
                    w.write_all(rec)?;
                    last = Some(rec);
                }
            }
            w.flush()?;
        }
        file.rewind()?;
        self.runs.push(file);
        self.buffer.clear();
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<File>> {
        if let Some(e) = self.failed.take() {
            return Err(e);
        }
        self.flush()?;
        Ok(self.runs)
    }
}

struct RunReader {
    reader: BufReader<File>,
    dim: usize,
}

impl RunReader {
    fn next_record(&mut self) -> Result<Option<Vec<u8>>> {
        let mut rec = vec![0u8; self.dim];
        let mut filled = 0usize;
        while filled < self.dim {
            let got = self.reader.read(&mut rec[filled..])?;
            if got == 0 {
                if filled == 0 {
                    return Ok(None);
                }
                return Err(Error::Io(std::io::Error::new(
                    std::io::ErrorKind::UnexpectedEof,
                    "truncated run record",
                )));
            }
            filled += got;
        }
        Ok(Some(rec))
    }
}

/// Merges sorted runs, emitting each distinct record once in ascending
/// order.
fn merge_runs(runs: Vec<File>, dim: usize, sink: &mut impl FnMut(&[u8])) -> Result<u64> {
    // Keep the number of simultaneously open readers bounded.
    let mut runs = runs;
    while runs.len() > 200 {
        let batch: Vec<File> = runs.drain(..128).collect();
        let mut out = tempfile::tempfile()?;
        {
            let mut w = BufWriter::new(&mut out);
            merge_into(batch, dim, &mut |rec| w.write_all(rec))??;
            w.flush()?;
        }
        out.rewind()?;
        runs.push(out);
    }
    let mut count = 0u64;
    merge_into(runs, dim, &mut |rec| {
        count += 1;
        sink(rec);
        Ok(())
    })??;
    Ok(count)
}

fn merge_into(
    runs: Vec<File>,
    dim: usize,
    emit: &mut impl FnMut(&[u8]) -> std::io::Result<()>,
) -> Result<std::io::Result<()>> {
    let mut readers: Vec<RunReader> = runs
        .into_iter()
        .map(|f| RunReader { reader: BufReader::with_capacity(1 << 16, f), dim })
        .collect();
    let mut heap: BinaryHeap<Reverse<(Vec<u8>, usize)>> = BinaryHeap::new();
    for (i, r) in readers.iter_mut().enumerate() {
        if let Some(rec) = r.next_record()? {
            heap.push(Reverse((rec, i)));
        }
    }
    let mut last: Option<Vec<u8>> = None;
    while let Some(Reverse((rec, i))) = heap.pop() {
        if last.as_deref() != Some(rec.as_slice()) {
            if let Err(e) = emit(&rec) {
                return Ok(Err(e));
            }
            last = Some(rec.clone());
        }
        if let Some(next) = readers[i].next_record()? {
            heap.push(Reverse((next, i)));
        }
    }
    Ok(Ok(()))
}

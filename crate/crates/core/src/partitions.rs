//! Partitions in an `n x N` box: enumeration, conjugation, box addition.
//!
//! `Lambda_{nN}` is the set of integer tuples `N >= l_1 >= ... >= l_n >= 0`.
//! Both the declared length `n` and the cap `N` are part of a partition's
//! identity — `(3,2,0)` capped at 3 and capped at 4 conjugate differently.

use crate::error::{Error, Result};

/// A partition `lambda` of declared length `n` with all parts `<= cap`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
    cap: u32,
}

/// A position where a box can be added: increment row `row` (1-based) to the
/// new part value `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AddableBox {
    pub row: usize,
    pub value: u32,
}

// `len` is the declared row count `n`, never zero; emptiness is a property
// of the diagram, not the container (`is_empty_diagram`)
#[allow(clippy::len_without_is_empty)]
impl Partition {
    /// Validates weak decrease and the cap.
    pub fn new(parts: Vec<u32>, cap: u32) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("partition length must be >= 1".into()));
        }
        if let Some(&first) = parts.first() {
            if first > cap {
                return Err(Error::Domain(format!(
                    "part {first} exceeds cap {cap}"
                )));
            }
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!("parts not weakly decreasing: {parts:?}")));
        }
        Ok(Partition { parts, cap })
    }

    /// The empty diagram `(0,...,0)`.
    pub fn zero(n: usize, cap: u32) -> Self {
        Partition {
            parts: vec![0; n],
            cap,
        }
    }

    /// The full box `(N,...,N)`.
    pub fn full(n: usize, cap: u32) -> Self {
        Partition {
            parts: vec![cap; n],
            cap,
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Declared length `n`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty_diagram(&self) -> bool {
        self.parts.iter().all(|&v| v == 0)
    }

    /// The cap `N`.
    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Part in 1-based row `i` (`i <= n`).
    pub fn part(&self, i: usize) -> u32 {
        self.parts[i - 1]
    }

    /// Total number of boxes `|lambda|`.
    pub fn boxes(&self) -> u64 {
        self.parts.iter().map(|&v| v as u64).sum()
    }

    /// Conjugate under the cap convention: the result has length `N` and cap
    /// `n`, with `lambda'_i = #{ j : lambda_j >= i }`.
    pub fn conjugate(&self) -> Partition {
        let mut parts = Vec::with_capacity(self.cap as usize);
        for i in 1..=self.cap {
            parts.push(self.parts.iter().filter(|&&v| v >= i).count() as u32);
        }
        if parts.is_empty() {
            // cap 0 forces lambda = (0,...,0); its conjugate lives in
            // Lambda_{0,n}, which we represent as a single zero row so the
            // value stays a valid partition.
            parts.push(0);
        }
        Partition {
            parts,
            cap: self.parts.len() as u32,
        }
    }

    /// All positions where one box may be added without leaving the box.
    pub fn addable_boxes(&self) -> Vec<AddableBox> {
        let mut out = Vec::new();
        for (idx, &v) in self.parts.iter().enumerate() {
            let above = if idx == 0 { self.cap } else { self.parts[idx - 1] };
            if v < above {
                out.push(AddableBox {
                    row: idx + 1,
                    value: v + 1,
                });
            }
        }
        out
    }

    /// A fresh partition with one box added at `at`.
    pub fn with_box(&self, at: AddableBox) -> Result<Partition> {
        let mut parts = self.parts.clone();
        let idx = at
            .row
            .checked_sub(1)
            .filter(|&i| i < parts.len())
            .ok_or_else(|| Error::Domain(format!("row {} out of range", at.row)))?;
        if parts[idx] + 1 != at.value {
            return Err(Error::Domain(format!(
                "box value {} does not extend part {}",
                at.value, parts[idx]
            )));
        }
        parts[idx] += 1;
        Partition::new(parts, self.cap)
    }
}

impl std::fmt::Display for Partition {
    /// Renders as `"λ=(3,2,0);n=3;N=4"`, the form used in JSON reports.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let body: Vec<String> = self.parts.iter().map(|v| v.to_string()).collect();
        write!(
            f,
            "λ=({});n={};N={}",
            body.join(","),
            self.parts.len(),
            self.cap
        )
    }
}

/// Every partition in `Lambda_{nN}` exactly once, lexicographically
/// decreasing; `|Lambda_{nN}| = C(n+N, n)`.
pub fn enumerate(n: usize, cap: u32) -> Vec<Partition> {
    let mut out = Vec::with_capacity(count(n, cap) as usize);
    let mut prefix = Vec::with_capacity(n);
    fill(&mut out, &mut prefix, n, cap, cap);
    out
}

fn fill(out: &mut Vec<Partition>, prefix: &mut Vec<u32>, n: usize, cap: u32, bound: u32) {
    if prefix.len() == n {
        out.push(Partition {
            parts: prefix.clone(),
            cap,
        });
        return;
    }
    let mut v = bound;
    loop {
        prefix.push(v);
        fill(out, prefix, n, cap, v);
        prefix.pop();
        if v == 0 {
            break;
        }
        v -= 1;
    }
}

/// `C(n+N, n)` as `u64`.
pub fn count(n: usize, cap: u32) -> u64 {
    let mut acc: u64 = 1;
    for i in 1..=n as u64 {
        acc = acc * (cap as u64 + i) / i;
    }
    acc
}

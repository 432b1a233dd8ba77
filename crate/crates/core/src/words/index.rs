use std::cmp::Ordering;

use super::FiniteWord;

/// Suffix array with LCP and a sparse table for constant-time
/// longest-common-extension queries.
///
/// Every answer is exact: occurrence queries compare letters directly, and
/// the LCP array is computed from the letters (Kasai), never from hashes.
#[derive(Debug, Clone)]
pub struct FactorIndex {
    text: Vec<u64>,
    sa: Vec<usize>,
    rank: Vec<usize>,
    // lcp[k] = lcp(sa[k-1], sa[k]); lcp[0] = 0
    lcp: Vec<usize>,
    sparse: Vec<Vec<usize>>,
}

impl FactorIndex {
    pub fn new(word: &FiniteWord) -> Self {
        Self::from_letters(word.letters())
    }

    /// Builds over raw letters; 0 may be used as a separator.
    pub(crate) fn from_letters(text: &[u64]) -> Self {
        let sa = suffix_array(text);
        let mut rank = vec![0; text.len()];
        for (k, &s) in sa.iter().enumerate() {
            rank[s] = k;
        }
        let lcp = kasai(text, &sa, &rank);
        let sparse = build_sparse(&lcp);
        Self {
            text: text.to_vec(),
            sa,
            rank,
            lcp,
            sparse,
        }
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn suffix_array(&self) -> &[usize] {
        &self.sa
    }

    /// Length of the longest common prefix of the suffixes at `i` and `j`.
    pub fn lce(&self, i: usize, j: usize) -> usize {
        let n = self.text.len();
        if i >= n || j >= n {
            return 0;
        }
        if i == j {
            return n - i;
        }
        let (a, b) = {
            let (x, y) = (self.rank[i], self.rank[j]);
            if x < y {
                (x + 1, y)
            } else {
                (y + 1, x)
            }
        };
        range_min(&self.sparse, a, b)
    }

    /// All start positions of `pattern`, ascending.
    pub fn occurrences(&self, pattern: &[u64]) -> Vec<usize> {
        if pattern.is_empty() {
            return (0..=self.text.len()).collect();
        }
        let cmp = |s: usize| -> Ordering {
            let suffix = &self.text[s..];
            let m = suffix.len().min(pattern.len());
            match suffix[..m].cmp(&pattern[..m]) {
                Ordering::Equal if suffix.len() < pattern.len() => Ordering::Less,
                Ordering::Equal => Ordering::Equal,
                o => o,
            }
        };
        let lo = self.sa.partition_point(|&s| cmp(s) == Ordering::Less);
        let hi = self.sa.partition_point(|&s| cmp(s) != Ordering::Greater);
        let mut out: Vec<usize> = self.sa[lo..hi].to_vec();
        out.sort_unstable();
        out
    }

    /// Groups of start positions sharing the same length-`len` factor, in
    /// suffix-array order. Positions too close to the end are skipped.
    fn classes(&self, len: usize) -> Vec<Vec<usize>> {
        let n = self.text.len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut open = false;
        for k in 0..n {
            let s = self.sa[k];
            if n - s < len {
                open = false;
                continue;
            }
            if open && self.lcp[k] >= len {
                out.last_mut().expect("open class").push(s);
            } else {
                out.push(vec![s]);
                open = true;
            }
        }
        out
    }

    /// Number of distinct factors of length `len`.
    pub fn distinct_count(&self, len: usize) -> usize {
        let n = self.text.len();
        if len == 0 {
            return 1;
        }
        (0..n)
            .filter(|&k| n - self.sa[k] >= len && (k == 0 || self.lcp[k] < len))
            .count()
    }

    /// Smallest pair `i < j` of start positions of a common length-`len`
    /// factor (occurrences may overlap).
    pub fn repeated_factor(&self, len: usize) -> Option<(usize, usize)> {
        self.classes(len)
            .into_iter()
            .filter(|c| c.len() >= 2)
            .map(|mut c| {
                c.sort_unstable();
                (c[0], c[1])
            })
            .min()
    }

    /// Smallest `(i, j)` with `j >= i + len` and equal length-`len` factors.
    pub fn disjoint_repeat(&self, len: usize) -> Option<(usize, usize)> {
        if len == 0 {
            return None;
        }
        self.classes(len)
            .into_iter()
            .filter_map(|mut c| {
                c.sort_unstable();
                let i = c[0];
                let k = c.partition_point(|&p| p < i + len);
                c.get(k).map(|&j| (i, j))
            })
            .min()
    }
}

/// Mirror-pair search over the text `w 0 mirror(w)`.
pub(crate) fn mirror_pair(w: &[u64], len: usize) -> Option<(usize, usize)> {
    let n = w.len();
    let mut text = Vec::with_capacity(2 * n + 1);
    text.extend_from_slice(w);
    text.push(0);
    text.extend(w.iter().rev());
    let index = FactorIndex::from_letters(&text);
    let mut best: Option<(usize, usize)> = None;
    for class in index.classes(len) {
        // forward windows give j; windows of the reversed half at k are the
        // mirror of the forward window starting at n - (k - n - 1) - len
        let mut js = Vec::new();
        let mut is = Vec::new();
        for s in class {
            if s + len <= n {
                js.push(s);
            } else if s > n {
                let k = s - n - 1;
                is.push(n - k - len);
            }
        }
        if js.is_empty() || is.is_empty() {
            continue;
        }
        js.sort_unstable();
        let i = *is.iter().min().expect("non-empty");
        let k = js.partition_point(|&p| p < i + len);
        if let Some(&j) = js.get(k) {
            if best.is_none_or(|b| (i, j) < b) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Prefix doubling: O(n log^2 n), fine for the prefix sizes used here.
fn suffix_array(text: &[u64]) -> Vec<usize> {
    let n = text.len();
    let mut sa: Vec<usize> = (0..n).collect();
    if n <= 1 {
        return sa;
    }
    sa.sort_by_key(|&i| text[i]);
    let mut rank = vec![0usize; n];
    for k in 1..n {
        rank[sa[k]] = rank[sa[k - 1]] + usize::from(text[sa[k]] != text[sa[k - 1]]);
    }
    let mut tmp = vec![0usize; n];
    let mut step = 1;
    while rank[sa[n - 1]] < n - 1 {
        let key = |i: usize| (rank[i], if i + step < n { rank[i + step] + 1 } else { 0 });
        sa.sort_by_key(|&i| key(i));
        tmp[sa[0]] = 0;
        for k in 1..n {
            tmp[sa[k]] = tmp[sa[k - 1]] + usize::from(key(sa[k]) != key(sa[k - 1]));
        }
        std::mem::swap(&mut rank, &mut tmp);
        step *= 2;
    }
    sa
}

fn kasai(text: &[u64], sa: &[usize], rank: &[usize]) -> Vec<usize> {
    let n = text.len();
    let mut lcp = vec![0; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1];
            while i + h < n && j + h < n && text[i + h] == text[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

fn build_sparse(values: &[usize]) -> Vec<Vec<usize>> {
    let mut table = vec![values.to_vec()];
    let mut width = 1;
    while 2 * width <= values.len() {
        let prev = table.last().expect("level");
        let next: Vec<usize> = (0..=values.len() - 2 * width)
            .map(|i| prev[i].min(prev[i + width]))
            .collect();
        table.push(next);
        width *= 2;
    }
    table
}

/// Minimum of `values[a..=b]`.
fn range_min(table: &[Vec<usize>], a: usize, b: usize) -> usize {
    let span = b - a + 1;
    let level = (usize::BITS - 1 - span.leading_zeros()) as usize;
    table[level][a].min(table[level][b + 1 - (1 << level)])
}

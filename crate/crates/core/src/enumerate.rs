//! Word production.
//!
//! Two enumerators produce the reduced words of a group up to a depth:
//!
//! * [`enumerate_lexicographic`] walks the word tree depth first, checking
//!   each appended symbol against the cancellation rules before descending.
//! * [`enumerate_index`] walks a range of integers, converts each one to a
//!   digit string and discards the strings that are not reduced. Cardinal mode
//!   uses ordinary base-`n` digits plus every leading-zero padding of the
//!   result; ordinal mode uses bijective base-`n` digits shifted down by one,
//!   which reaches every string exactly once without padding.
//!
//! Neither keeps more than the word currently being examined. Words are handed
//! to a [`WordSink`] as borrowed slices of a single working buffer.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::groups::{CancellationRules, PairRules, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(usize),
    #[error("depth must be at least 1")]
    InvalidDepth,
    #[error("bijective numeration has no digit string for 0")]
    DomainError,
    #[error("empty range {start}..{end}")]
    EmptyRange { start: u128, end: u128 },
    #[error("range {start}..{end} exceeds the valid interval {min}..{max}")]
    RangeError { start: u128, end: u128, min: u128, max: u128 },
    #[error("config base {config} does not match the {rules} generators of the rules")]
    AlphabetMismatch { config: usize, rules: usize },
    #[error("the lexicographic tree cannot start from an arbitrary index")]
    RangeNotSupported,
    #[error("count exceeds 128-bit integers")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnumerationMode {
    LexicographicTree,
    IndexCardinal,
    IndexOrdinal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumeratorConfig {
    base: usize,
    max_depth: usize,
    mode: EnumerationMode,
    range: Option<(u128, u128)>,
}

impl EnumeratorConfig {
    pub fn new(base: usize, max_depth: usize, mode: EnumerationMode) -> Result<Self, EnumerateError> {
        if base < 2 || base > u8::MAX as usize + 1 {
            return Err(EnumerateError::InvalidBase(base));
        }
        if max_depth == 0 {
            return Err(EnumerateError::InvalidDepth);
        }
        Ok(EnumeratorConfig { base, max_depth, mode, range: None })
    }

    /// Restricts an index mode to the half-open integer interval `start..end`.
    pub fn with_range(mut self, start: u128, end: u128) -> Result<Self, EnumerateError> {
        if self.mode == EnumerationMode::LexicographicTree {
            return Err(EnumerateError::RangeNotSupported);
        }
        if start >= end {
            return Err(EnumerateError::EmptyRange { start, end });
        }
        let (min, max) = self.full_range()?;
        if start < min || end > max {
            return Err(EnumerateError::RangeError { start, end, min, max });
        }
        self.range = Some((start, end));
        Ok(self)
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn mode(&self) -> EnumerationMode {
        self.mode
    }

    pub fn range(&self) -> Option<(u128, u128)> {
        self.range
    }

    /// All integers the mode can convert without exceeding the depth:
    /// `0..n^d` for cardinal, `1..=sum n^i` for ordinal.
    pub fn full_range(&self) -> Result<(u128, u128), EnumerateError> {
        let report = counts(self.base, self.max_depth)?;
        match self.mode {
            EnumerationMode::IndexCardinal => Ok((0, report.n_l)),
            EnumerationMode::IndexOrdinal | EnumerationMode::LexicographicTree => {
                Ok((1, report.n_t.checked_add(1).ok_or(EnumerateError::Overflow)?))
            }
        }
    }

    pub fn effective_range(&self) -> Result<(u128, u128), EnumerateError> {
        match self.range {
            Some(r) => Ok(r),
            None => self.full_range(),
        }
    }
}

/// Consumer of enumerated words. Returning `Break` stops the enumeration.
pub trait WordSink {
    fn accept(&mut self, word: &[u8]) -> ControlFlow<()>;
}

impl<F: FnMut(&[u8])> WordSink for F {
    fn accept(&mut self, word: &[u8]) -> ControlFlow<()> {
        self(word);
        ControlFlow::Continue(())
    }
}

/// Counters filled in by both enumerators.
///
/// `examined` counts candidate strings (tree: every attempted child; index:
/// every converted or padded string) and `visited + skipped == examined`.
/// `emitted` is what reached the sink; it equals `visited` except for a
/// leaves-only tree walk. The retention fields record the largest number of
/// words and symbols held at once by the enumerator itself.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub examined: u64,
    pub visited: u64,
    pub emitted: u64,
    pub skipped: u64,
    pub peak_retained_words: usize,
    pub peak_retained_symbols: usize,
    pub stopped: bool,
}

impl EnumerationStats {
    fn hold(&mut self, words: usize, symbols: usize) {
        self.peak_retained_words = self.peak_retained_words.max(words);
        self.peak_retained_symbols = self.peak_retained_symbols.max(symbols);
    }

    /// Sums counters; peaks add up because the runs are assumed concurrent.
    pub fn merge(&mut self, other: &EnumerationStats) {
        self.examined += other.examined;
        self.visited += other.visited;
        self.emitted += other.emitted;
        self.skipped += other.skipped;
        self.peak_retained_words += other.peak_retained_words;
        self.peak_retained_symbols += other.peak_retained_symbols;
        self.stopped |= other.stopped;
    }
}

impl CancellationRules {
    /// Scan state after reading `first`, the rightmost symbol of a word.
    #[inline]
    pub(crate) fn scan_start(&self, first: u8) -> usize {
        match self {
            CancellationRules::Presentation(_) => first as usize,
            CancellationRules::Cayley(t) => t.initial_state(first),
        }
    }

    /// Reads `next`, the symbol to the left of everything read so far.
    #[inline]
    pub(crate) fn scan_advance(&self, state: usize, next: u8) -> Option<usize> {
        match self {
            CancellationRules::Presentation(p) => {
                if p.is_forbidden(next, state as u8) {
                    None
                } else {
                    Some(next as usize)
                }
            }
            CancellationRules::Cayley(t) => t.advance(state, next),
        }
    }

    fn scan(&self, digits: &[u8]) -> Option<usize> {
        let (&first, rest) = digits.split_last()?;
        rest.iter()
            .rev()
            .try_fold(self.scan_start(first), |s, &d| self.scan_advance(s, d))
    }
}

fn check_base(n: usize) {
    assert!((2..=256).contains(&n), "base must be in 2..=256, got {n}");
}

/// Writes the base-`n` digits of `i` into the tail of `buf`, returning how
/// many were written. Zero is the single digit 0.
fn write_base(mut i: u128, n: usize, buf: &mut [u8]) -> usize {
    let mut pos = buf.len();
    if i <= u64::MAX as u128 {
        let (mut v, n) = (i as u64, n as u64);
        loop {
            pos -= 1;
            buf[pos] = (v % n) as u8;
            v /= n;
            if v == 0 {
                break;
            }
        }
    } else {
        let n = n as u128;
        loop {
            pos -= 1;
            buf[pos] = (i % n) as u8;
            i /= n;
            if i == 0 {
                break;
            }
        }
    }
    buf.len() - pos
}

/// Bijective base-`n` digits of `i >= 1`, each lowered by one, written into
/// the tail of `buf`.
fn write_bijective(mut i: u128, n: usize, buf: &mut [u8]) -> usize {
    let mut pos = buf.len();
    if i <= u64::MAX as u128 {
        let (mut v, n) = (i as u64, n as u64);
        while v > 0 {
            pos -= 1;
            v -= 1;
            buf[pos] = (v % n) as u8;
            v /= n;
        }
    } else {
        let n = n as u128;
        while i > 0 {
            pos -= 1;
            i -= 1;
            buf[pos] = (i % n) as u8;
            i /= n;
        }
    }
    buf.len() - pos
}

pub fn to_base(i: u128, n: usize) -> Word {
    check_base(n);
    let mut buf = [0u8; 128];
    let len = write_base(i, n, &mut buf);
    Word::from(&buf[128 - len..])
}

/// Positional value of a digit string, `None` on overflow or a digit `>= n`.
pub fn from_base(digits: &[u8], n: usize) -> Option<u128> {
    digits.iter().try_fold(0u128, |acc, &d| {
        if d as usize >= n {
            return None;
        }
        acc.checked_mul(n as u128)?.checked_add(d as u128)
    })
}

/// The digit string over `0..n` whose digits, each raised by one, spell `i`
/// in bijective base `n`.
pub fn to_bijective_base(i: u128, n: usize) -> Result<Word, EnumerateError> {
    if n < 2 {
        return Err(EnumerateError::InvalidBase(n));
    }
    check_base(n);
    if i == 0 {
        return Err(EnumerateError::DomainError);
    }
    let mut buf = [0u8; 128];
    let len = write_bijective(i, n, &mut buf);
    Ok(Word::from(&buf[128 - len..]))
}

pub fn from_bijective_base(digits: &[u8], n: usize) -> Option<u128> {
    digits.iter().try_fold(0u128, |acc, &d| {
        if d as usize >= n {
            return None;
        }
        acc.checked_mul(n as u128)?.checked_add(d as u128 + 1)
    })
}

/// `w` followed by each of its zero-prefixed variants up to `max_len`.
pub fn pad_variants(w: &Word, max_len: usize) -> Vec<Word> {
    (w.len()..=max_len.max(w.len()))
        .map(|len| {
            let mut digits = vec![0u8; len - w.len()];
            digits.extend_from_slice(w.digits());
            Word::new(digits)
        })
        .collect()
}

/// Number of base-`n` digits of `i >= 1`, i.e. `floor(log_n i) + 1`.
pub fn digits_required(i: u128, n: usize) -> usize {
    check_base(n);
    assert!(i >= 1, "digit count is defined for i >= 1");
    let mut count = 1;
    let mut v = i / n as u128;
    while v > 0 {
        count += 1;
        v /= n as u128;
    }
    count
}

/// Word counts for `n` generators up to length `d`.
///
/// `n_t` and `n_l` count all strings (`sum_{i=1..d} n^i` and `n^d`);
/// the `reduced_*` fields count reduced words when every generator has
/// exactly one forbidden neighbour, giving `n (n-1)^{i-1}` words of length i.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountReport {
    pub n: usize,
    pub d: usize,
    pub n_t: u128,
    pub n_l: u128,
    pub reduced_t: u128,
    pub reduced_l: u128,
}

impl CountReport {
    /// Nodes of the reduced word tree, root included.
    pub fn process_steps(&self) -> u128 {
        self.reduced_t + 1
    }
}

pub fn counts(n: usize, d: usize) -> Result<CountReport, EnumerateError> {
    if n < 2 {
        return Err(EnumerateError::InvalidBase(n));
    }
    let base = n as u128;
    let (mut n_t, mut n_l) = (0u128, 1u128);
    let (mut reduced_t, mut reduced_l) = (0u128, 1u128);
    for i in 1..=d {
        n_l = n_l.checked_mul(base).ok_or(EnumerateError::Overflow)?;
        n_t = n_t.checked_add(n_l).ok_or(EnumerateError::Overflow)?;
        reduced_l = if i == 1 {
            base
        } else {
            reduced_l.checked_mul(base - 1).ok_or(EnumerateError::Overflow)?
        };
        reduced_t = reduced_t.checked_add(reduced_l).ok_or(EnumerateError::Overflow)?;
    }
    Ok(CountReport { n, d, n_t, n_l, reduced_t, reduced_l })
}

/// Reduced words of exactly `len` symbols under arbitrary pair rules,
/// by dynamic programming over the last symbol.
pub fn count_reduced_words(rules: &PairRules, len: usize) -> Result<u128, EnumerateError> {
    let n = rules.alphabet_len();
    if len == 0 {
        return Ok(1);
    }
    let mut ending = vec![1u128; n];
    for _ in 1..len {
        let mut next = vec![0u128; n];
        for (r, slot) in next.iter_mut().enumerate() {
            for (l, &count) in ending.iter().enumerate() {
                if !rules.is_forbidden(l as u8, r as u8) {
                    *slot = slot.checked_add(count).ok_or(EnumerateError::Overflow)?;
                }
            }
        }
        ending = next;
    }
    ending
        .iter()
        .try_fold(0u128, |acc, &c| acc.checked_add(c))
        .ok_or(EnumerateError::Overflow)
}

fn check_alphabet(rules: &CancellationRules, n: usize) -> Result<(), EnumerateError> {
    if rules.alphabet_len() != n {
        return Err(EnumerateError::AlphabetMismatch { config: n, rules: rules.alphabet_len() });
    }
    Ok(())
}

/// Depth-first walk of the reduced word tree. Each child prepends one symbol
/// (the next one read right to left), so the rules are checked incrementally
/// and a cancelled branch is never entered. With `leaves_only` only words of
/// exactly `depth` symbols reach the sink.
pub fn enumerate_lexicographic<S: WordSink + ?Sized>(
    rules: &CancellationRules,
    depth: usize,
    leaves_only: bool,
    sink: &mut S,
) -> EnumerationStats {
    let n = rules.alphabet_len();
    let mut stats = EnumerationStats::default();
    if depth == 0 {
        return stats;
    }
    let mut path = vec![0u8; depth];
    let mut states = vec![0usize; depth];
    let mut cursor = vec![0usize; depth + 1];
    let mut len = 0usize;
    stats.hold(1, 0);
    loop {
        if cursor[len] == n {
            if len == 0 {
                break;
            }
            len -= 1;
            continue;
        }
        let digit = cursor[len] as u8;
        cursor[len] += 1;
        stats.examined += 1;
        let state = if len == 0 {
            Some(rules.scan_start(digit))
        } else {
            rules.scan_advance(states[len - 1], digit)
        };
        let Some(state) = state else {
            stats.skipped += 1;
            continue;
        };
        path[depth - 1 - len] = digit;
        states[len] = state;
        len += 1;
        stats.hold(1, len);
        stats.visited += 1;
        if !leaves_only || len == depth {
            stats.emitted += 1;
            if sink.accept(&path[depth - len..]).is_break() {
                stats.stopped = true;
                break;
            }
        }
        if len < depth {
            cursor[len] = 0;
        } else {
            len -= 1;
        }
    }
    stats
}

/// Integer-driven enumeration over `cfg`'s range (or the mode's full range).
pub fn enumerate_index<S: WordSink + ?Sized>(
    rules: &CancellationRules,
    cfg: &EnumeratorConfig,
    sink: &mut S,
) -> Result<EnumerationStats, EnumerateError> {
    check_alphabet(rules, cfg.base)?;
    let (start, end) = cfg.effective_range()?;
    let n = cfg.base;
    let d = cfg.max_depth;
    let mut buf = vec![0u8; d];
    let mut stats = EnumerationStats::default();
    match cfg.mode {
        EnumerationMode::IndexOrdinal => {
            for i in start..end {
                let len = write_bijective(i, n, &mut buf);
                let word = &buf[d - len..];
                stats.examined += 1;
                stats.hold(1, len);
                if rules.scan(word).is_none() {
                    stats.skipped += 1;
                    continue;
                }
                stats.visited += 1;
                stats.emitted += 1;
                if sink.accept(word).is_break() {
                    stats.stopped = true;
                    break;
                }
            }
        }
        EnumerationMode::IndexCardinal => {
            'outer: for i in start..end {
                let len = write_base(i, n, &mut buf);
                let mut state = rules.scan(&buf[d - len..]);
                for padded in len..=d {
                    if padded > len {
                        buf[d - padded] = 0;
                        state = state.and_then(|s| rules.scan_advance(s, 0));
                    }
                    stats.examined += 1;
                    stats.hold(1, padded);
                    if state.is_none() {
                        stats.skipped += 1;
                        continue;
                    }
                    stats.visited += 1;
                    stats.emitted += 1;
                    if sink.accept(&buf[d - padded..]).is_break() {
                        stats.stopped = true;
                        break 'outer;
                    }
                }
            }
        }
        EnumerationMode::LexicographicTree => {
            return Err(EnumerateError::RangeNotSupported);
        }
    }
    Ok(stats)
}

/// Runs whichever enumerator `cfg` selects. Tree mode visits every node
/// (not only leaves) and rejects a range.
pub fn enumerate<S: WordSink + ?Sized>(
    rules: &CancellationRules,
    cfg: &EnumeratorConfig,
    sink: &mut S,
) -> Result<EnumerationStats, EnumerateError> {
    match cfg.mode {
        EnumerationMode::LexicographicTree => {
            check_alphabet(rules, cfg.base)?;
            if cfg.range.is_some() {
                return Err(EnumerateError::RangeNotSupported);
            }
            Ok(enumerate_lexicographic(rules, cfg.max_depth, false, sink))
        }
        _ => enumerate_index(rules, cfg, sink),
    }
}

/// Splits `start..end` into at most `parts` contiguous, non-empty pieces.
pub fn split_range(start: u128, end: u128, parts: usize) -> Vec<(u128, u128)> {
    if start >= end || parts == 0 {
        return Vec::new();
    }
    let total = end - start;
    let parts = (parts as u128).min(total);
    (0..parts)
        .map(|k| (start + total * k / parts, start + total * (k + 1) / parts))
        .collect()
}

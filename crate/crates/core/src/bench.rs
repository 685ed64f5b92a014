//! Word-count accounting and enumerator benchmarks.

use std::fmt;
use std::ops::ControlFlow;
use std::thread;
use std::time::{Duration, Instant};

use crate::enumerate::{
    count_reduced_words, enumerate_index, enumerate_lexicographic, split_range, EnumerateError, EnumerationMode,
    EnumerationStats, EnumeratorConfig, WordSink,
};
use crate::groups::{CancellationRules, GroupError, PairRules};

/// Word lengths tabulated by [`count_table`] by default.
pub const TABLE_LENGTHS: [usize; 10] = [0, 1, 3, 5, 7, 9, 11, 13, 15, 17];

/// Previously published limit-set step counts for four generators at
/// [`TABLE_LENGTHS`]. They follow `3^(d-1)` rather than either `n^d` or
/// `n (n-1)^(d-1)`, so they are printed for comparison only.
pub const REFERENCE_LIMIT_ROW: [u128; 10] = [1, 4, 9, 81, 729, 6561, 59049, 531441, 4782969, 43046721];

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub time_budget: Option<Duration>,
    /// Contiguous ranges run concurrently in index modes.
    pub ranges: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { time_budget: None, ranges: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub mode: EnumerationMode,
    pub n: usize,
    pub d: usize,
    pub words_emitted: u64,
    pub words_skipped: u64,
    pub examined: u64,
    /// Tree nodes visited plus the root; equals emitted + 1 in tree mode.
    pub process_steps: u64,
    pub wall_time: Duration,
    pub peak_retained_words: usize,
    pub peak_retained_symbols: usize,
    pub ranges: usize,
    pub partial: bool,
}

impl BenchResult {
    /// Index modes must hold at most one word of at most `d + 1` symbols per
    /// range at any time.
    pub fn storage_within_bound(&self) -> bool {
        match self.mode {
            EnumerationMode::LexicographicTree => true,
            _ => {
                self.peak_retained_words <= self.ranges
                    && self.peak_retained_symbols <= (self.d + 1) * self.ranges
            }
        }
    }

    fn from_stats(mode: EnumerationMode, n: usize, d: usize, ranges: usize, s: &EnumerationStats, t: Duration) -> Self {
        BenchResult {
            mode,
            n,
            d,
            words_emitted: s.emitted,
            words_skipped: s.skipped,
            examined: s.examined,
            process_steps: s.visited + 1,
            wall_time: t,
            peak_retained_words: s.peak_retained_words,
            peak_retained_symbols: s.peak_retained_symbols,
            ranges,
            partial: s.stopped,
        }
    }
}

pub fn mode_name(mode: EnumerationMode) -> &'static str {
    match mode {
        EnumerationMode::LexicographicTree => "lex",
        EnumerationMode::IndexCardinal => "cardinal",
        EnumerationMode::IndexOrdinal => "ordinal",
    }
}

struct CountingSink {
    count: u64,
    started: Instant,
    budget: Option<Duration>,
}

impl WordSink for CountingSink {
    #[inline]
    fn accept(&mut self, word: &[u8]) -> ControlFlow<()> {
        std::hint::black_box(word);
        self.count += 1;
        if let Some(budget) = self.budget {
            if self.count.is_multiple_of(4096) && self.started.elapsed() > budget {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    }
}

fn run_one(
    rules: &CancellationRules,
    cfg: &EnumeratorConfig,
    started: Instant,
    budget: Option<Duration>,
) -> Result<EnumerationStats, EnumerateError> {
    let mut sink = CountingSink { count: 0, started, budget };
    match cfg.mode() {
        EnumerationMode::LexicographicTree => {
            Ok(enumerate_lexicographic(rules, cfg.max_depth(), false, &mut sink))
        }
        _ => enumerate_index(rules, cfg, &mut sink),
    }
}

/// Runs each mode over every reduced word of length 1..=d with a counting
/// sink, one mode after another.
pub fn run_bench(
    rules: &CancellationRules,
    d: usize,
    modes: &[EnumerationMode],
    opts: &BenchOptions,
) -> Result<Vec<BenchResult>, EnumerateError> {
    let n = rules.alphabet_len();
    let mut out = Vec::with_capacity(modes.len());
    for &mode in modes {
        let cfg = EnumeratorConfig::new(n, d, mode)?;
        let ranges = if mode == EnumerationMode::LexicographicTree { 1 } else { opts.ranges.max(1) };
        let started = Instant::now();
        let stats = if ranges == 1 {
            run_one(rules, &cfg, started, opts.time_budget)?
        } else {
            let (a, b) = cfg.effective_range()?;
            let parts = split_range(a, b, ranges)
                .into_iter()
                .map(|(s, e)| cfg.with_range(s, e))
                .collect::<Result<Vec<_>, _>>()?;
            let results = thread::scope(|scope| {
                let handles: Vec<_> = parts
                    .iter()
                    .map(|c| scope.spawn(move || run_one(rules, c, started, opts.time_budget)))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect::<Vec<_>>()
            });
            let mut merged = EnumerationStats::default();
            for r in results {
                merged.merge(&r?);
            }
            merged
        };
        out.push(BenchResult::from_stats(mode, n, d, ranges, &stats, started.elapsed()));
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "mode,n,d,emitted,skipped,ms,peak_words,peak_symbols";

pub fn to_csv(results: &[BenchResult]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in results {
        s.push_str(&format!(
            "{},{},{},{},{},{:.3},{},{}\n",
            mode_name(r.mode),
            r.n,
            r.d,
            r.words_emitted,
            r.words_skipped,
            r.wall_time.as_secs_f64() * 1e3,
            r.peak_retained_words,
            r.peak_retained_symbols
        ));
    }
    s
}

pub fn to_text(results: &[BenchResult]) -> String {
    let mut s = format!(
        "{:<9} {:>3} {:>3} {:>12} {:>12} {:>12} {:>10} {:>6} {:>6}\n",
        "mode", "n", "d", "emitted", "skipped", "steps", "ms", "words", "syms"
    );
    for r in results {
        s.push_str(&format!(
            "{:<9} {:>3} {:>3} {:>12} {:>12} {:>12} {:>10.2} {:>6} {:>6}{}\n",
            mode_name(r.mode),
            r.n,
            r.d,
            r.words_emitted,
            r.words_skipped,
            r.process_steps,
            r.wall_time.as_secs_f64() * 1e3,
            r.peak_retained_words,
            r.peak_retained_symbols,
            if r.partial { "  (partial: time budget)" } else { "" }
        ));
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RulesVariant {
    /// Every generator is its own inverse.
    SelfInverse,
    /// Generator i is paired with i + n/2.
    Paired,
}

impl RulesVariant {
    pub fn pair_rules(self, n: usize) -> Result<PairRules, GroupError> {
        let inverse: Vec<usize> = match self {
            RulesVariant::SelfInverse => (0..n).collect(),
            RulesVariant::Paired => {
                if !n.is_multiple_of(2) {
                    return Err(GroupError::InvalidConfiguration(format!(
                        "paired generators need an even count, got {n}"
                    )));
                }
                (0..n).map(|i| (i + n / 2) % n).collect()
            }
        };
        Ok(PairRules::from_inverse_index(&inverse))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountRow {
    pub length: usize,
    /// Reduced words of length 1..=length plus the root.
    pub tessellation_steps: u128,
    /// Reduced words of exactly `length` symbols (1 at length 0).
    pub limit_steps: u128,
    /// All strings of exactly `length` symbols.
    pub limit_unreduced: u128,
    pub reference_limit: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub n: usize,
    pub variant: RulesVariant,
    pub rows: Vec<CountRow>,
}

/// Binary-prefixed size at one byte per step.
pub fn format_bytes(bytes: u128) -> String {
    const KB: f64 = 1024.0;
    let b = bytes as f64;
    if bytes < 1024 {
        format!("{bytes}B")
    } else if b < KB * KB {
        format!("{:.1}KB", b / KB)
    } else if b < KB * KB * KB {
        format!("{:.2}MB", b / (KB * KB))
    } else {
        format!("{:.2}GB", b / (KB * KB * KB))
    }
}

pub fn count_table(n: usize, lengths: &[usize], variant: RulesVariant) -> Result<CountTable, EnumerateError> {
    if n < 2 {
        return Err(EnumerateError::InvalidBase(n));
    }
    let rules = variant.pair_rules(n).map_err(|_| EnumerateError::InvalidBase(n))?;
    let max = lengths.iter().copied().max().unwrap_or(0);
    let mut per_length = Vec::with_capacity(max + 1);
    for len in 0..=max {
        per_length.push(count_reduced_words(&rules, len)?);
    }
    let mut rows = Vec::with_capacity(lengths.len());
    for &len in lengths {
        let steps = per_length[1..=len]
            .iter()
            .try_fold(1u128, |acc, &c| acc.checked_add(c))
            .ok_or(EnumerateError::Overflow)?;
        let unreduced = (n as u128).checked_pow(len as u32).ok_or(EnumerateError::Overflow)?;
        let reference = (n == 4)
            .then(|| TABLE_LENGTHS.iter().position(|&l| l == len).map(|k| REFERENCE_LIMIT_ROW[k]))
            .flatten();
        rows.push(CountRow {
            length: len,
            tessellation_steps: steps,
            limit_steps: per_length[len],
            limit_unreduced: unreduced,
            reference_limit: reference,
        });
    }
    Ok(CountTable { n, variant, rows })
}

impl fmt::Display for CountTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let variant = match self.variant {
            RulesVariant::SelfInverse => "self-inverse",
            RulesVariant::Paired => "paired inverses",
        };
        writeln!(f, "n={} ({variant}), 1 byte per step", self.n)?;
        writeln!(f, "{:>6} {:>12} {:>10} {:>12} {:>12} {:>12}", "length", "tess steps", "tess size", "limit steps", "n^d", "reference")?;
        for r in &self.rows {
            let reference = r.reference_limit.map_or_else(|| "-".to_string(), |v| v.to_string());
            writeln!(
                f,
                "{:>6} {:>12} {:>10} {:>12} {:>12} {:>12}",
                r.length,
                r.tessellation_steps,
                format_bytes(r.tessellation_steps),
                r.limit_steps,
                r.limit_unreduced,
                reference
            )?;
        }
        if self.rows.iter().any(|r| r.reference_limit.is_some_and(|v| v != r.limit_unreduced && v != r.limit_steps)) {
            writeln!(
                f,
                "note: the reference limit-set column grows as 3^(d-1) and matches neither n^d nor n(n-1)^(d-1)"
            )?;
        }
        Ok(())
    }
}

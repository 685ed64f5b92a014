//! Generator sets, words and cancellation rules.
//!
//! Generators are addressed by their 0-based position in a [`GeneratorSet`];
//! a [`Word`] is a digit string over those positions. Words are written like
//! compositions and read right to left: the last digit is applied first.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::moebius::{Circle, Complex, MoebiusError, MoebiusMap, PlaneMap, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("cayley table incomplete: {0}")]
    TableIncomplete(String),
    #[error("unknown generator label '{0}'")]
    UnknownLabel(char),
    #[error("digit {digit} out of range for {n} generators")]
    DigitOutOfRange { digit: u8, n: usize },
    #[error("cascading reduction needs presentation (pair) rules")]
    UnsupportedRules,
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// A digit string over generator indices, written left to right and applied
/// right to left.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    digits: Vec<u8>,
}

impl Word {
    pub fn new(digits: Vec<u8>) -> Self {
        Word { digits }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

impl From<&[u8]> for Word {
    fn from(digits: &[u8]) -> Self {
        Word::new(digits.to_vec())
    }
}

impl From<Vec<u8>> for Word {
    fn from(digits: Vec<u8>) -> Self {
        Word::new(digits)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    Conformal(MoebiusMap),
    /// Reflection in a circle; always its own inverse.
    AntiConformal(Circle),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub label: char,
}

impl Generator {
    pub fn moebius(map: MoebiusMap, label: char) -> Self {
        Generator { kind: GeneratorKind::Conformal(map), label }
    }

    pub fn inversion(circle: Circle, label: char) -> Self {
        Generator { kind: GeneratorKind::AntiConformal(circle), label }
    }

    pub fn apply(&self, p: Point) -> Point {
        match &self.kind {
            GeneratorKind::Conformal(g) => g.apply(p),
            GeneratorKind::AntiConformal(c) => c.invert_point(p),
        }
    }

    /// Inversion circle for reflections, isometric circle for Moebius maps.
    pub fn base_circle(&self) -> Result<Circle, MoebiusError> {
        match &self.kind {
            GeneratorKind::Conformal(g) => g.isometric_circle(),
            GeneratorKind::AntiConformal(c) => Ok(*c),
        }
    }

    pub fn image_of_circle(&self, circle: &Circle) -> Result<Circle, MoebiusError> {
        match &self.kind {
            GeneratorKind::Conformal(g) => g.image_of_circle(circle),
            GeneratorKind::AntiConformal(c) => c.inversion_image_of_circle(circle),
        }
    }
}

impl PlaneMap for Generator {
    fn map_point(&self, p: Point) -> Point {
        self.apply(p)
    }

    fn pole(&self) -> Point {
        match &self.kind {
            GeneratorKind::Conformal(g) => g.pole(),
            GeneratorKind::AntiConformal(c) => c.pole(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    generators: Vec<Generator>,
    inverse_index: Vec<usize>,
}

const CHECK_POINTS: [(f64, f64); 4] = [(0.3, 0.7), (-1.1, 0.2), (2.5, -1.9), (0.05, -0.4)];

impl GeneratorSet {
    /// Validates the inverse pairing: it must be an involution, reflections
    /// must map to themselves, and paired maps must compose to the identity.
    pub fn new(generators: Vec<Generator>, inverse_index: Vec<usize>) -> Result<Self, GroupError> {
        let n = generators.len();
        if n == 0 || n > u8::MAX as usize {
            return Err(GroupError::InvalidConfiguration(format!(
                "generator count must be in 1..=255, got {n}"
            )));
        }
        if inverse_index.len() != n {
            return Err(GroupError::InvalidConfiguration(format!(
                "inverse index has {} entries for {n} generators",
                inverse_index.len()
            )));
        }
        for (i, gen) in generators.iter().enumerate() {
            if generators[..i].iter().any(|g| g.label == gen.label) {
                return Err(GroupError::InvalidConfiguration(format!(
                    "duplicate generator label '{}'",
                    gen.label
                )));
            }
        }
        for (i, &j) in inverse_index.iter().enumerate() {
            if j >= n || inverse_index[j] != i {
                return Err(GroupError::InvalidConfiguration(format!(
                    "inverse index is not an involution at position {i}"
                )));
            }
            let (gi, gj) = (&generators[i], &generators[j]);
            if matches!(gi.kind, GeneratorKind::AntiConformal(_)) && i != j {
                return Err(GroupError::InvalidConfiguration(format!(
                    "reflection '{}' must be its own inverse",
                    gi.label
                )));
            }
            for (re, im) in CHECK_POINTS {
                let z = Complex::new(re, im);
                let ok = match gj.apply(gi.apply(z.into())) {
                    Point::Finite(w) => (w - z).norm() <= 1e-9 * (1.0 + z.norm()),
                    Point::Infinity => false,
                };
                if !ok {
                    return Err(GroupError::InvalidConfiguration(format!(
                        "'{}' and '{}' are not mutually inverse",
                        gi.label, gj.label
                    )));
                }
            }
        }
        Ok(GeneratorSet { generators, inverse_index })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn get(&self, index: u8) -> &Generator {
        &self.generators[index as usize]
    }

    pub fn inverse_index(&self) -> &[usize] {
        &self.inverse_index
    }

    pub fn is_self_inverse(&self) -> bool {
        self.inverse_index.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Forbidden pairs `(i, inverse(i))`: the free-product presentation.
    pub fn presentation_rules(&self) -> CancellationRules {
        CancellationRules::Presentation(PairRules::from_inverse_index(&self.inverse_index))
    }

    pub fn index_of(&self, label: char) -> Option<u8> {
        self.generators.iter().position(|g| g.label == label).map(|i| i as u8)
    }

    pub fn parse_word(&self, letters: &str) -> Result<Word, GroupError> {
        letters
            .chars()
            .map(|ch| self.index_of(ch).ok_or(GroupError::UnknownLabel(ch)))
            .collect::<Result<Vec<_>, _>>()
            .map(Word::new)
    }

    pub fn spell(&self, digits: &[u8]) -> String {
        digits.iter().map(|&d| self.generators[d as usize].label).collect()
    }

    pub fn check_word(&self, digits: &[u8]) -> Result<(), GroupError> {
        let n = self.len();
        match digits.iter().find(|&&d| d as usize >= n) {
            Some(&digit) => Err(GroupError::DigitOutOfRange { digit, n }),
            None => Ok(()),
        }
    }
}

/// Forbidden adjacent pairs `(left, right)` in written order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRules {
    n: usize,
    forbidden: Vec<bool>,
}

impl PairRules {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (u8, u8)>) -> Result<Self, GroupError> {
        let mut forbidden = vec![false; n * n];
        for (l, r) in pairs {
            for d in [l, r] {
                if d as usize >= n {
                    return Err(GroupError::DigitOutOfRange { digit: d, n });
                }
            }
            forbidden[l as usize * n + r as usize] = true;
        }
        Ok(PairRules { n, forbidden })
    }

    pub fn from_inverse_index(inverse_index: &[usize]) -> Self {
        let n = inverse_index.len();
        let mut forbidden = vec![false; n * n];
        for (i, &j) in inverse_index.iter().enumerate() {
            forbidden[i * n + j] = true;
        }
        PairRules { n, forbidden }
    }

    pub fn alphabet_len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_forbidden(&self, left: u8, right: u8) -> bool {
        self.forbidden[left as usize * self.n + right as usize]
    }

    pub fn pairs(&self) -> Vec<(u8, u8)> {
        let n = self.n;
        (0..n * n)
            .filter(|&k| self.forbidden[k])
            .map(|k| ((k / n) as u8, (k % n) as u8))
            .collect()
    }

    pub fn is_reduced(&self, digits: &[u8]) -> bool {
        digits.windows(2).all(|w| !self.is_forbidden(w[0], w[1]))
    }

    /// Deletes forbidden adjacent pairs until none is left. A deletion can
    /// expose a new forbidden pair, which is deleted in turn.
    pub fn reduce(&self, digits: &[u8]) -> Word {
        let mut out: Vec<u8> = Vec::with_capacity(digits.len());
        for &d in digits {
            match out.last() {
                Some(&top) if self.is_forbidden(top, d) => {
                    out.pop();
                }
                _ => out.push(d),
            }
        }
        Word::new(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CayleyCell {
    /// Continue from the row named by this word.
    Replace(Vec<u8>),
    Cancel,
}

/// Multiplication table driving a right-to-left scan of a word.
///
/// Rows are labelled by words (the most recently read symbols, newest on the
/// left); columns are generator indices. A `Replace` cell names the next row.
/// When that word is not itself a row label, the scan continues from the
/// longest run of most recently read symbols that is one, i.e. the longest
/// written-order prefix of the replacement with a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    n: usize,
    labels: Vec<Vec<u8>>,
    rows: HashMap<Vec<u8>, usize>,
    cells: Vec<Vec<CayleyCell>>,
    next: Vec<Vec<Option<usize>>>,
}

impl CayleyTable {
    /// Every row needs one cell per generator and every single generator
    /// needs a row, since scans start from the first symbol read.
    pub fn new(n: usize, rows: Vec<(Vec<u8>, Vec<CayleyCell>)>) -> Result<Self, GroupError> {
        let mut labels = Vec::with_capacity(rows.len());
        let mut index = HashMap::new();
        let mut cells = Vec::with_capacity(rows.len());
        for (label, row) in rows {
            if label.is_empty() {
                return Err(GroupError::InvalidConfiguration("empty row label".into()));
            }
            if let Some(&digit) = label.iter().find(|&&d| d as usize >= n) {
                return Err(GroupError::DigitOutOfRange { digit, n });
            }
            if row.len() != n {
                return Err(GroupError::TableIncomplete(format!(
                    "row {label:?} has {} cells, expected {n}",
                    row.len()
                )));
            }
            for cell in &row {
                if let CayleyCell::Replace(w) = cell {
                    if w.is_empty() {
                        return Err(GroupError::InvalidConfiguration(
                            "empty replacement word".into(),
                        ));
                    }
                    if let Some(&digit) = w.iter().find(|&&d| d as usize >= n) {
                        return Err(GroupError::DigitOutOfRange { digit, n });
                    }
                }
            }
            if index.insert(label.clone(), labels.len()).is_some() {
                return Err(GroupError::InvalidConfiguration(format!(
                    "duplicate row {label:?}"
                )));
            }
            labels.push(label);
            cells.push(row);
        }
        for d in 0..n as u8 {
            if !index.contains_key(&vec![d]) {
                return Err(GroupError::TableIncomplete(format!("missing row for generator {d}")));
            }
        }
        let next = cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| match cell {
                        CayleyCell::Cancel => None,
                        CayleyCell::Replace(w) => {
                            (1..=w.len()).rev().find_map(|k| index.get(&w[..k]).copied())
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(CayleyTable { n, labels, rows: index, cells, next })
    }

    /// The simple one-letter table equivalent to a set of forbidden pairs:
    /// reading `next` after `state` cancels when `(next, state)` is forbidden.
    pub fn from_pairs(rules: &PairRules) -> Self {
        let n = rules.alphabet_len();
        let rows = (0..n as u8)
            .map(|state| {
                let row = (0..n as u8)
                    .map(|next| {
                        if rules.is_forbidden(next, state) {
                            CayleyCell::Cancel
                        } else {
                            CayleyCell::Replace(vec![next])
                        }
                    })
                    .collect();
                (vec![state], row)
            })
            .collect();
        CayleyTable::new(n, rows).expect("single-letter table is complete")
    }

    pub fn alphabet_len(&self) -> usize {
        self.n
    }

    pub fn row_labels(&self) -> &[Vec<u8>] {
        &self.labels
    }

    pub fn step(&self, state: &[u8], next: u8) -> Result<&CayleyCell, GroupError> {
        let row = *self
            .rows
            .get(state)
            .ok_or_else(|| GroupError::TableIncomplete(format!("no row labelled {state:?}")))?;
        self.cells[row]
            .get(next as usize)
            .ok_or(GroupError::DigitOutOfRange { digit: next, n: self.n })
    }

    #[inline]
    pub(crate) fn initial_state(&self, first: u8) -> usize {
        self.rows[&[first][..]]
    }

    #[inline]
    pub(crate) fn advance(&self, state: usize, next: u8) -> Option<usize> {
        self.next[state][next as usize]
    }

    pub fn is_reduced(&self, digits: &[u8]) -> bool {
        let mut rev = digits.iter().rev();
        let Some(&first) = rev.next() else {
            return true;
        };
        let mut state = self.initial_state(first);
        for &d in rev {
            match self.advance(state, d) {
                Some(s) => state = s,
                None => return false,
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CancellationRules {
    Presentation(PairRules),
    Cayley(CayleyTable),
}

impl CancellationRules {
    pub fn alphabet_len(&self) -> usize {
        match self {
            CancellationRules::Presentation(p) => p.alphabet_len(),
            CancellationRules::Cayley(t) => t.alphabet_len(),
        }
    }

    pub fn is_reduced(&self, digits: &[u8]) -> bool {
        match self {
            CancellationRules::Presentation(p) => p.is_reduced(digits),
            CancellationRules::Cayley(t) => t.is_reduced(digits),
        }
    }

    pub fn reduce(&self, word: &Word) -> Result<Word, GroupError> {
        match self {
            CancellationRules::Presentation(p) => Ok(p.reduce(word.digits())),
            CancellationRules::Cayley(_) => Err(GroupError::UnsupportedRules),
        }
    }
}

/// Pairing of `exterior` with `interior`: the Moebius map sending
/// `c + r e^{it}` to `c' + r' e^{-it}`, which carries the outside of the first
/// circle onto the inside of the second. It is reflection in the first circle
/// followed by an orientation-reversing similarity onto the second.
pub fn pairing_map(exterior: &Circle, interior: &Circle) -> MoebiusMap {
    let (a, r) = (exterior.center(), exterior.radius());
    let (a2, r2) = (interior.center(), interior.radius());
    MoebiusMap::new(a2, r * r2 - a * a2, Complex::new(1.0, 0.0), -a)
        .expect("pairing map has determinant -r r'")
}

#[derive(Clone, Copy)]
enum Overlap {
    /// Closed discs must not meet.
    ClosedDiscs,
    /// Boundaries may touch, within 1e-9.
    Tangency,
}

fn check_disjoint(circles: &[Circle], rule: Overlap) -> Result<(), GroupError> {
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let dist = (circles[i].center() - circles[j].center()).norm();
            let gap = dist - (circles[i].radius() + circles[j].radius());
            let bad = match rule {
                Overlap::ClosedDiscs => gap <= 0.0,
                Overlap::Tangency => gap < -1e-9,
            };
            if bad {
                return Err(GroupError::InvalidConfiguration(format!(
                    "circles {i} and {j} overlap (gap {gap:.3e})"
                )));
            }
        }
    }
    Ok(())
}

/// Two-generator Schottky group. Generator order is `a, b, A, B` with
/// `a` pairing `c1 -> c1p` and `b` pairing `c2 -> c2p`.
pub fn make_schottky_group(
    c1: Circle,
    c1p: Circle,
    c2: Circle,
    c2p: Circle,
) -> Result<GeneratorSet, GroupError> {
    check_disjoint(&[c1, c1p, c2, c2p], Overlap::ClosedDiscs)?;
    let g1 = pairing_map(&c1, &c1p);
    let g2 = pairing_map(&c2, &c2p);
    GeneratorSet::new(
        vec![
            Generator::moebius(g1, 'a'),
            Generator::moebius(g2, 'b'),
            Generator::moebius(g1.inverse(), 'A'),
            Generator::moebius(g2.inverse(), 'B'),
        ],
        vec![2, 3, 0, 1],
    )
}

/// Four reflections whose circles are pairwise tangent or disjoint.
pub fn make_tangent_inversion_group(circles: [Circle; 4]) -> Result<GeneratorSet, GroupError> {
    check_disjoint(&circles, Overlap::Tangency)?;
    let generators = circles
        .iter()
        .zip(['a', 'b', 'c', 'd'])
        .map(|(c, label)| Generator::inversion(*c, label))
        .collect();
    GeneratorSet::new(generators, vec![0, 1, 2, 3])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(x: f64, y: f64, r: f64) -> Circle {
        Circle::new(Complex::new(x, y), r).unwrap()
    }

    /// a, b, A, B bound to 0, 1, 2, 3.
    fn letters(s: &str) -> Vec<u8> {
        s.chars()
            .map(|c| match c {
                'a' => 0,
                'b' => 1,
                'A' => 2,
                'B' => 3,
                _ => panic!("{c}"),
            })
            .collect()
    }

    fn free_rules() -> PairRules {
        PairRules::from_inverse_index(&[2, 3, 0, 1])
    }

    fn box_table_free() -> CayleyTable {
        // rows a, b, A, B; columns a, b, A, B; None = dagger
        let raw = [
            ("a", ["a", "b", "", "B"]),
            ("b", ["a", "b", "A", ""]),
            ("A", ["", "b", "A", "B"]),
            ("B", ["a", "", "A", "B"]),
        ];
        let rows = raw
            .iter()
            .map(|(label, cells)| {
                let row = cells
                    .iter()
                    .map(|c| {
                        if c.is_empty() {
                            CayleyCell::Cancel
                        } else {
                            CayleyCell::Replace(letters(c))
                        }
                    })
                    .collect();
                (letters(label), row)
            })
            .collect();
        CayleyTable::new(4, rows).unwrap()
    }

    fn box_table_self_inverse() -> CayleyTable {
        let rows = (0..4u8)
            .map(|i| {
                let row = (0..4u8)
                    .map(|j| if i == j { CayleyCell::Cancel } else { CayleyCell::Replace(vec![j]) })
                    .collect();
                (vec![i], row)
            })
            .collect();
        CayleyTable::new(4, rows).unwrap()
    }

    #[test]
    fn is_reduced_examples() {
        let rules = CancellationRules::Presentation(free_rules());
        assert!(rules.is_reduced(&letters("abA")));
        assert!(!rules.is_reduced(&letters("aA")));
        assert!(rules.is_reduced(&[]));
    }

    #[test]
    fn reduce_examples() {
        let rules = free_rules();
        assert_eq!(rules.reduce(&letters("ababBAA")).into_digits(), letters("abA"));
        assert_eq!(rules.reduce(&letters("aaBb")).into_digits(), letters("aa"));
        assert_eq!(rules.reduce(&letters("abAB")).into_digits(), letters("abAB"));
        let self_inv = PairRules::from_inverse_index(&[0, 1]);
        assert_eq!(self_inv.reduce(&[0, 1, 1, 0, 1]).into_digits(), vec![1]);
    }

    #[test]
    fn reduce_rejects_cayley() {
        let rules = CancellationRules::Cayley(box_table_free());
        assert_eq!(rules.reduce(&Word::empty()), Err(GroupError::UnsupportedRules));
    }

    #[test]
    fn self_inverse_pairs_are_diagonal() {
        let rules = PairRules::from_inverse_index(&[0, 1, 2, 3]);
        assert_eq!(rules.pairs(), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(free_rules().pairs(), vec![(0, 2), (1, 3), (2, 0), (3, 1)]);
    }

    #[test]
    fn cayley_excerpt_rows() {
        let mut rows: Vec<_> = (0..4u8)
            .map(|i| (vec![i], (0..4u8).map(|j| CayleyCell::Replace(vec![j])).collect()))
            .collect();
        let r = |s: &str| CayleyCell::Replace(letters(s));
        rows.push((letters("bAB"), vec![CayleyCell::Cancel, CayleyCell::Cancel, r("BA"), r("B")]));
        rows.push((letters("Bab"), vec![r("ba"), r("b"), CayleyCell::Cancel, CayleyCell::Cancel]));
        let table = CayleyTable::new(4, rows).unwrap();
        assert_eq!(table.step(&letters("bAB"), 0), Ok(&CayleyCell::Cancel));
        assert_eq!(table.step(&letters("Bab"), 2), Ok(&CayleyCell::Cancel));
        assert_eq!(table.step(&letters("Bab"), 0), Ok(&r("ba")));
        assert!(matches!(
            table.step(&letters("abab"), 0),
            Err(GroupError::TableIncomplete(_))
        ));
    }

    #[test]
    fn cayley_simple_table_steps() {
        let table = box_table_free();
        assert_eq!(table.step(&letters("a"), 1), Ok(&CayleyCell::Replace(letters("b"))));
        assert_eq!(table.step(&letters("a"), 2), Ok(&CayleyCell::Cancel));
        // abA read right to left: A -b-> b -a-> a
        assert!(table.is_reduced(&letters("abA")));
        assert!(!table.is_reduced(&letters("Bbba")));
    }

    #[test]
    fn cayley_longest_prefix_resolution() {
        // row "ba" exists; replacement "bab" resolves to it
        let mut rows: Vec<_> = (0..2u8)
            .map(|i| (vec![i], (0..2u8).map(|j| CayleyCell::Replace(vec![j, i])).collect()))
            .collect();
        rows.push((vec![1, 0], vec![CayleyCell::Replace(vec![0]), CayleyCell::Cancel]));
        let table = CayleyTable::new(2, rows).unwrap();
        // reading "0" then "1" gives state [1,0]; a further "1" cancels
        assert!(table.is_reduced(&[1, 0]));
        assert!(!table.is_reduced(&[1, 1, 0]));
        assert!(table.is_reduced(&[0, 1, 0]));
    }

    #[test]
    fn cayley_table_requires_single_letter_rows() {
        let rows = vec![(vec![0], vec![CayleyCell::Cancel, CayleyCell::Replace(vec![1])])];
        assert!(matches!(CayleyTable::new(2, rows), Err(GroupError::TableIncomplete(_))));
        let short = vec![(vec![0], vec![CayleyCell::Cancel])];
        assert!(matches!(CayleyTable::new(2, short), Err(GroupError::TableIncomplete(_))));
    }

    fn all_words(n: u8, max_len: usize) -> Vec<Vec<u8>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w: &Vec<u8>| {
                    (0..n).map(move |d| {
                        let mut v = w.clone();
                        v.push(d);
                        v
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    #[test]
    fn box_tables_agree_with_presentations() {
        let free = free_rules();
        let free_table = box_table_free();
        let si = PairRules::from_inverse_index(&[0, 1, 2, 3]);
        let si_table = box_table_self_inverse();
        for w in all_words(4, 6) {
            assert_eq!(free.is_reduced(&w), free_table.is_reduced(&w), "{w:?}");
            assert_eq!(si.is_reduced(&w), si_table.is_reduced(&w), "{w:?}");
        }
        assert_eq!(CayleyTable::from_pairs(&free), free_table);
    }

    #[test]
    fn schottky_construction() {
        let gs = make_schottky_group(
            circle(-2.0, 0.0, 0.5),
            circle(2.0, 0.0, 0.5),
            circle(0.0, -2.0, 0.5),
            circle(0.0, 2.0, 0.5),
        )
        .unwrap();
        assert_eq!(gs.len(), 4);
        assert_eq!(gs.inverse_index(), &[2, 3, 0, 1]);
        assert!(gs
            .generators()
            .iter()
            .all(|g| matches!(g.kind, GeneratorKind::Conformal(_))));
        // exterior of c1 lands inside c1'
        let target = circle(2.0, 0.0, 0.5);
        for z in [Complex::new(5.0, 1.0), Complex::new(0.0, 0.0), Complex::new(-2.0, 3.0)] {
            let w = gs.get(0).apply(z.into()).finite().unwrap();
            assert!(target.boundary_distance(w) < 0.0, "{w}");
        }
        // and A sends the exterior of c1' into c1
        let w = gs.get(2).apply(Point::new(0.0, 0.0)).finite().unwrap();
        assert!(circle(-2.0, 0.0, 0.5).boundary_distance(w) < 0.0);
        assert_eq!(gs.presentation_rules(), CancellationRules::Presentation(free_rules()));
    }

    #[test]
    fn schottky_rejects_overlap() {
        let err = make_schottky_group(
            circle(-2.0, 0.0, 3.0),
            circle(2.0, 0.0, 3.0),
            circle(0.0, -2.0, 3.0),
            circle(0.0, 2.0, 3.0),
        );
        assert!(matches!(err, Err(GroupError::InvalidConfiguration(_))));
    }

    #[test]
    fn tangent_group_construction() {
        let s = 2f64.sqrt();
        let cs = [circle(s, 0.0, 1.0), circle(0.0, s, 1.0), circle(-s, 0.0, 1.0), circle(0.0, -s, 1.0)];
        for i in 0..4 {
            let j = (i + 1) % 4;
            let dist = (cs[i].center() - cs[j].center()).norm();
            assert!((dist - cs[i].radius() - cs[j].radius()).abs() < 1e-9);
        }
        let gs = make_tangent_inversion_group(cs).unwrap();
        assert!(gs.is_self_inverse());
        let rules = gs.presentation_rules();
        let CancellationRules::Presentation(p) = &rules else { unreachable!() };
        assert_eq!(p.pairs(), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);

        let concentric = [circle(0.0, 0.0, 1.0), circle(0.0, 0.0, 2.0), circle(5.0, 0.0, 1.0), circle(-5.0, 0.0, 1.0)];
        assert!(matches!(
            make_tangent_inversion_group(concentric),
            Err(GroupError::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn generator_set_validates_pairing() {
        let g = MoebiusMap::real(2.0, 0.0, 0.0, 1.0).unwrap();
        let not_inverse = MoebiusMap::real(3.0, 0.0, 0.0, 1.0).unwrap();
        let bad = GeneratorSet::new(
            vec![Generator::moebius(g, 'a'), Generator::moebius(not_inverse, 'A')],
            vec![1, 0],
        );
        assert!(matches!(bad, Err(GroupError::InvalidConfiguration(_))));
        let not_involution = GeneratorSet::new(
            vec![Generator::moebius(g, 'a'), Generator::moebius(g.inverse(), 'A')],
            vec![1, 1],
        );
        assert!(not_involution.is_err());
        let ok = GeneratorSet::new(
            vec![Generator::moebius(g, 'a'), Generator::moebius(g.inverse(), 'A')],
            vec![1, 0],
        )
        .unwrap();
        assert_eq!(ok.parse_word("aAa").unwrap().digits(), &[0, 1, 0]);
        assert_eq!(ok.parse_word("ax"), Err(GroupError::UnknownLabel('x')));
        assert_eq!(ok.spell(&[1, 0]), "Aa");
        assert_eq!(ok.check_word(&[0, 2]), Err(GroupError::DigitOutOfRange { digit: 2, n: 2 }));
    }
}

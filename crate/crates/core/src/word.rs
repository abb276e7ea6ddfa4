//! Words in a finitely generated free group.
//!
//! A [`Word`] is kept freely reduced at all times: no letter is adjacent to
//! its own inverse. Cyclic reduction additionally strips matching first/last
//! letters and reports the stripped conjugator.

use std::fmt;

/// One letter: a generator index together with an orientation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u32,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: u32) -> Self {
        Letter { gen, inverse: false }
    }

    pub fn inv(gen: u32) -> Self {
        Letter { gen, inverse: true }
    }

    pub fn inverted(&self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Freely reduce an arbitrary letter sequence.
pub fn reduce_word(letters: &[Letter]) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if stack.last().is_some_and(|t| t.cancels(&l)) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    Word { letters: stack }
}

/// Cyclically reduce `w`: returns `(core, conj)` with `w = conj * core * conj^-1`
/// and no cancellation between the ends of `core`.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let mut letters = w.letters.clone();
    let mut conj = Vec::new();
    while letters.len() >= 2 && letters[0].cancels(letters.last().unwrap()) {
        conj.push(letters[0]);
        letters.remove(0);
        letters.pop();
    }
    (Word { letters }, Word { letters: conj })
}

impl Word {
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        reduce_word(&letters)
    }

    /// The word `g_i` for a single generator.
    pub fn generator(gen: u32) -> Self {
        Word { letters: vec![Letter::new(gen)] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverted()).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        reduce_word(&letters)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.concat(self).concat(&c.inverse())
    }

    /// Exponent-sum vector (image in the abelianization).
    pub fn exponent_vector(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for l in &self.letters {
            let idx = l.gen as usize;
            if idx < rank {
                v[idx] += if l.inverse { -1 } else { 1 };
            }
        }
        v
    }

    /// Maximal runs of one generator: `(gen, signed exponent)` pairs.
    pub fn syllables(&self) -> Vec<(u32, i64)> {
        let mut out: Vec<(u32, i64)> = Vec::new();
        for l in &self.letters {
            let e = if l.inverse { -1 } else { 1 };
            match out.last_mut() {
                Some((g, exp)) if *g == l.gen => *exp += e,
                _ => out.push((l.gen, e)),
            }
        }
        out
    }

    /// Generators that occur in the word, with occurrence counts.
    pub fn support(&self) -> Vec<(u32, usize)> {
        let mut counts: Vec<(u32, usize)> = Vec::new();
        for l in &self.letters {
            match counts.iter_mut().find(|(g, _)| *g == l.gen) {
                Some((_, c)) => *c += 1,
                None => counts.push((l.gen, 1)),
            }
        }
        counts.sort();
        counts
    }

    /// Replace every occurrence of generator `gen` by `image` (and of its
    /// inverse by the inverse image), then reduce.
    pub fn substitute(&self, gen: u32, image: &Word) -> Word {
        let inv = image.inverse();
        let mut letters = Vec::new();
        for l in &self.letters {
            if l.gen == gen {
                let w = if l.inverse { &inv } else { image };
                letters.extend_from_slice(&w.letters);
            } else {
                letters.push(*l);
            }
        }
        reduce_word(&letters)
    }

    /// Apply a homomorphism given by generator images.
    pub fn map_generators(&self, images: &[Word]) -> Word {
        let mut letters = Vec::new();
        for l in &self.letters {
            let img = &images[l.gen as usize];
            if l.inverse {
                letters.extend(img.inverse().letters);
            } else {
                letters.extend_from_slice(&img.letters);
            }
        }
        reduce_word(&letters)
    }

    pub fn display_with<F: Fn(u32) -> String>(&self, name: F) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        self.syllables()
            .iter()
            .map(|&(g, e)| {
                if e == 1 {
                    name(g)
                } else {
                    format!("{}^{}", name(g), e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(default_gen_name))
    }
}

/// `a`..`z` for the first 26 generators, `g27`, `g28`, ... beyond.
pub fn default_gen_name(gen: u32) -> String {
    if gen < 26 {
        ((b'a' + gen as u8) as char).to_string()
    } else {
        format!("g{}", gen + 1)
    }
}

/// Parse a word such as `a b^-1 c^2`, resolving generator names through
/// `resolve`. `1` denotes the identity.
pub fn parse_word<F: Fn(&str) -> Option<u32>>(s: &str, resolve: F) -> Result<Word, String> {
    let mut letters = Vec::new();
    for tok in s.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => {
                let exp: i64 = e.parse().map_err(|_| format!("bad exponent in `{}`", tok))?;
                (n, exp)
            }
            None => (tok, 1),
        };
        let gen = resolve(name).ok_or_else(|| format!("unknown generator `{}`", name))?;
        let letter = if exp < 0 { Letter::inv(gen) } else { Letter::new(gen) };
        for _ in 0..exp.unsigned_abs() {
            letters.push(letter);
        }
    }
    Ok(reduce_word(&letters))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        parse_word(s, |name| {
            let b = name.as_bytes();
            (b.len() == 1 && b[0].is_ascii_lowercase()).then(|| (b[0] - b'a') as u32)
        })
        .unwrap()
    }

    #[test]
    fn reduction_cancels_adjacent_inverses() {
        let raw = vec![
            Letter::new(0),
            Letter::new(1),
            Letter::inv(1),
            Letter::inv(0),
            Letter::new(2),
        ];
        assert_eq!(reduce_word(&raw), w("c"));
    }

    #[test]
    fn cyclic_reduction_reports_conjugator() {
        let word = w("a b c b^-1 a^-1");
        let (core, conj) = cyclic_reduce(&word);
        assert_eq!(core, w("c"));
        assert_eq!(conj, w("a b"));
        assert_eq!(core.conjugate_by(&conj), word);
    }

    #[test]
    fn concat_reduces_at_seam() {
        assert_eq!(w("a b").concat(&w("b^-1 a")), w("a a"));
        assert!(w("a b").concat(&w("b^-1 a^-1")).is_identity());
    }

    #[test]
    fn substitution_and_images() {
        let word = w("a b a^-1");
        assert_eq!(word.substitute(0, &w("c c")), w("c c b c^-1 c^-1"));
        let images = vec![w("b"), w("a")];
        assert_eq!(word.map_generators(&images), w("b a b^-1"));
    }

    #[test]
    fn syllables_and_support() {
        let word = w("a a b^-1 b^-1 b^-1 a");
        assert_eq!(word.syllables(), vec![(0, 2), (1, -3), (0, 1)]);
        assert_eq!(word.support(), vec![(0, 3), (1, 3)]);
        assert_eq!(word.exponent_vector(2), vec![3, -3]);
    }

    #[test]
    fn parse_rejects_unknown_names() {
        assert!(parse_word("q", |_| None).is_err());
    }
}

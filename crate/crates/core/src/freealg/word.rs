use std::cmp::Ordering;
use std::fmt;

/// A generator of the free algebra.
///
/// `X(i)` letters are self-adjoint; `U(j)` and `UStar(j)` are swapped by the
/// involution. Indices are 1-based, matching the printed form `x1`, `u1*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    X(u32),
    U(u32),
    UStar(u32),
}

impl Letter {
    pub fn adjoint(self) -> Letter {
        match self {
            Letter::X(i) => Letter::X(i),
            Letter::U(j) => Letter::UStar(j),
            Letter::UStar(j) => Letter::U(j),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Letter::X(i) | Letter::U(i) | Letter::UStar(i) => i,
        }
    }

    pub fn is_x(self) -> bool {
        matches!(self, Letter::X(_))
    }

    // x1 < ... < xd < u1 < u1* < u2 < u2* < ...
    fn key(self) -> (u8, u32, u8) {
        match self {
            Letter::X(i) => (0, i, 0),
            Letter::U(j) => (1, j, 0),
            Letter::UStar(j) => (1, j, 1),
        }
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::X(i) => write!(f, "x{i}"),
            Letter::U(j) => write!(f, "u{j}"),
            Letter::UStar(j) => write!(f, "u{j}*"),
        }
    }
}

/// A monomial: a finite product of letters. The empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reverse the word and star every letter.
    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.adjoint()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.0.iter().rev().map(|l| l.adjoint()).eq(self.0.iter().cloned())
    }

    /// The smaller of `w` and `w*` in graded-lex order.
    pub fn canonical(&self) -> Word {
        let adj = self.adjoint();
        if adj < *self {
            adj
        } else {
            self.clone()
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                // `u1*x1` would read as u1 times x1
                if matches!(self.0[k - 1], Letter::UStar(_)) {
                    write!(f, " * ")?;
                } else {
                    write!(f, "*")?;
                }
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// The letters `x1..xd` followed by `u1, u1*, ..., uk, uk*`.
pub fn alphabet(d: u32, k: u32) -> Vec<Letter> {
    let mut out: Vec<Letter> = (1..=d).map(Letter::X).collect();
    for j in 1..=k {
        out.push(Letter::U(j));
        out.push(Letter::UStar(j));
    }
    out
}

/// Every word of degree at most `delta` over `alphabet`, graded-lex sorted.
pub fn words_up_to(alphabet: &[Letter], delta: usize) -> Vec<Word> {
    let mut sorted = alphabet.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..delta {
        let mut next = Vec::with_capacity(layer.len() * sorted.len());
        for w in &layer {
            for &l in &sorted {
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

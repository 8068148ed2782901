/// A binary relation on `0..n` stored as a dense boolean matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.set(i, i, true);
        }
        r
    }

    /// `{(i, j) : i ≤ j}`, the order on an ascending enumeration.
    pub fn upper(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            for j in i..n {
                r.set(i, j, true);
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.n + j] = v;
    }

    /// Pairs `(i, j)` with `i ≠ j`, row-major.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n)
            .flat_map(move |i| (0..self.n).map(move |j| (i, j)))
            .filter(move |&(i, j)| i != j && self.get(i, j))
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    /// Restriction to the listed points, re-indexed in list order.
    pub fn restrict(&self, points: &[usize]) -> Relation {
        let mut r = Relation::empty(points.len());
        for (a, &i) in points.iter().enumerate() {
            for (b, &j) in points.iter().enumerate() {
                r.set(a, b, self.get(i, j));
            }
        }
        r
    }
}

//! Binary linear block codes given by a generator matrix.

use rand::Rng;

use crate::error::{Error, Result};

/// Longest supported block length (a codeword is packed into a `u64`).
pub const MAX_BLOCK_LEN: usize = 64;

/// `(n, k_dim)` binary linear code.
///
/// A codeword packs channel use `j` into bit `j`. An information word `u` is
/// read most significant bit first: bit `k_dim − 1 − r` of `u` selects row `r`
/// of the generator, so zero padding in front of a short word leaves the
/// leading rows unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    rows: Vec<u64>,
}

fn rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut r = 0;
    for bit in 0..MAX_BLOCK_LEN {
        let Some(p) = (r..rows.len()).find(|&i| (rows[i] >> bit) & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && (*row >> bit) & 1 == 1 {
                *row ^= pivot;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

impl LinearCode {
    /// Code from packed generator rows. The rows must be linearly independent.
    pub fn from_packed(n: usize, rows: Vec<u64>) -> Result<Self> {
        if n == 0 || n > MAX_BLOCK_LEN {
            return Err(Error::InvalidCode(format!(
                "block length must be in 1..={MAX_BLOCK_LEN}, got {n}"
            )));
        }
        if rows.len() > n {
            return Err(Error::InvalidCode(format!(
                "dimension {} exceeds block length {n}",
                rows.len()
            )));
        }
        if n < MAX_BLOCK_LEN && rows.iter().any(|r| r >> n != 0) {
            return Err(Error::InvalidCode("generator row longer than the block length".into()));
        }
        if rank(&rows) != rows.len() {
            return Err(Error::InvalidCode(
                "generator matrix does not have full row rank".into(),
            ));
        }
        Ok(LinearCode { n, rows })
    }

    /// Code from a 0/1 generator matrix, one row per information bit.
    pub fn new(n: usize, generator: &[Vec<u8>]) -> Result<Self> {
        let mut rows = Vec::with_capacity(generator.len());
        for (r, row) in generator.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCode(format!(
                    "row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut packed = 0u64;
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => packed |= 1 << j,
                    _ => return Err(Error::InvalidCode(format!("entry {b} in row {r} is not binary"))),
                }
            }
            rows.push(packed);
        }
        LinearCode::from_packed(n, rows)
    }

    /// Parse the text format: a header line `n k_dim`, then `k_dim` lines of
    /// `n` whitespace-separated bits. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line, message: String| Error::Parse { line, message };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header `n k_dim`".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|f| {
                f.parse()
                    .map_err(|_| parse_err(hl, format!("`{f}` is not a nonnegative integer")))
            })
            .collect::<Result<_>>()?;
        let [n, k_dim] = dims[..] else {
            return Err(parse_err(hl, "header must be `n k_dim`".into()));
        };
        let mut generator = Vec::with_capacity(k_dim);
        for (line, l) in lines.by_ref().take(k_dim) {
            let row: Vec<u8> = l
                .split_whitespace()
                .map(|f| match f {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    _ => Err(parse_err(line, format!("`{f}` is not a bit"))),
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(parse_err(line, format!("expected {n} bits, found {}", row.len())));
            }
            generator.push(row);
        }
        if generator.len() != k_dim {
            return Err(parse_err(
                hl,
                format!("expected {k_dim} generator rows, found {}", generator.len()),
            ));
        }
        if let Some((line, _)) = lines.next() {
            return Err(parse_err(line, "unexpected content after the generator rows".into()));
        }
        LinearCode::new(n, &generator)
    }

    /// Text form accepted by [`LinearCode::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.k_dim());
        for row in self.generator() {
            let bits: Vec<&str> = row.iter().map(|&b| if b == 1 { "1" } else { "0" }).collect();
            s.push_str(&bits.join(" "));
            s.push('\n');
        }
        s
    }

    /// Uniformly random full-rank `(n, k_dim)` code.
    pub fn random<R: Rng + ?Sized>(n: usize, k_dim: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || n > MAX_BLOCK_LEN || k_dim > n {
            return Err(Error::InvalidCode(format!("no ({n}, {k_dim}) code")));
        }
        let mask = if n == MAX_BLOCK_LEN { u64::MAX } else { (1u64 << n) - 1 };
        loop {
            let rows: Vec<u64> = (0..k_dim).map(|_| rng.gen::<u64>() & mask).collect();
            if rank(&rows) == k_dim {
                return Ok(LinearCode { n, rows });
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_dim(&self) -> usize {
        self.rows.len()
    }

    /// Rate in bits per channel use.
    pub fn rate(&self) -> f64 {
        self.k_dim() as f64 / self.n as f64
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn generator(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| (0..self.n).map(|j| ((r >> j) & 1) as u8).collect())
            .collect()
    }

    /// Codeword of information word `u` (only its `k_dim` low bits are used).
    pub fn encode(&self, u: u64) -> u64 {
        let k = self.k_dim();
        self.rows
            .iter()
            .enumerate()
            .filter(|(r, _)| (u >> (k - 1 - r)) & 1 == 1)
            .fold(0, |c, (_, row)| c ^ row)
    }

    /// Generator row selected by bit `b` of the information word.
    pub(crate) fn row_for_bit(&self, b: usize) -> u64 {
        self.rows[self.k_dim() - 1 - b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_round_trip() {
        let text = "# (7,4) Hamming\n7 4\n1 0 0 0 1 1 0\n0 1 0 0 1 0 1\n0 0 1 0 0 1 1\n0 0 0 1 1 1 1\n";
        let code = LinearCode::parse(text).unwrap();
        assert_eq!((code.n(), code.k_dim()), (7, 4));
        assert_eq!(LinearCode::parse(&code.to_text()).unwrap(), code);
        // systematic: the information bits appear in the first four positions
        let c = code.encode(0b1011);
        assert_eq!(c & 0b1111, 0b1101);
    }

    #[test]
    fn parse_reports_lines() {
        let bad = "3 2\n1 0 1\n1 0 x\n";
        assert_eq!(
            LinearCode::parse(bad).unwrap_err(),
            Error::Parse {
                line: 3,
                message: "`x` is not a bit".into()
            }
        );
        assert!(matches!(
            LinearCode::parse("3 2\n1 0 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            LinearCode::parse("3 1\n1 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(LinearCode::parse("3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(LinearCode::parse(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn rejects_dependent_rows() {
        let g = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        assert!(matches!(LinearCode::new(3, &g), Err(Error::InvalidCode(_))));
    }

    #[test]
    fn random_codes_are_full_rank_and_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, k) in [(16, 8), (16, 16), (32, 20), (64, 10)] {
            let code = LinearCode::random(n, k, &mut rng).unwrap();
            assert_eq!(code.k_dim(), k);
            // 2^k distinct codewords for small k; linearity on random pairs
            if k <= 16 {
                let mut words: Vec<u64> = (0..1u64 << k).map(|u| code.encode(u)).collect();
                words.sort_unstable();
                words.dedup();
                assert_eq!(words.len(), 1 << k);
            }
            for _ in 0..100 {
                let (a, b) = (rng.gen::<u64>() & ((1 << k) - 1), rng.gen::<u64>() & ((1 << k) - 1));
                assert_eq!(code.encode(a ^ b), code.encode(a) ^ code.encode(b));
            }
        }
    }

    #[test]
    fn leading_zero_padding_skips_leading_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let code = LinearCode::random(12, 6, &mut rng).unwrap();
        assert_eq!(code.encode(1), code.rows()[5]);
        assert_eq!(code.encode(1 << 5), code.rows()[0]);
        assert_eq!(code.row_for_bit(0), code.rows()[5]);
    }
}

use std::str::FromStr;

/// `lo:hi:n[:log]`, or a single value.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub log: bool,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = |i: usize| i as f64 / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == self.n - 1 {
                    self.hi
                } else if self.log {
                    self.lo * (self.hi / self.lo).powf(step(i))
                } else {
                    self.lo + (self.hi - self.lo) * step(i)
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        let grid = match parts.as_slice() {
            [v] => Grid { lo: num(v)?, hi: num(v)?, n: 1, log: false },
            [lo, hi, n] | [lo, hi, n, _] => {
                let log = match parts.get(3).map(|t| t.trim()) {
                    None | Some("lin") => false,
                    Some("log") => true,
                    Some(other) => return Err(format!("unknown spacing `{other}` (use log or lin)")),
                };
                let n = n.trim().parse::<usize>().map_err(|_| format!("`{n}` is not a point count"))?;
                Grid { lo: num(lo)?, hi: num(hi)?, n, log }
            }
            _ => return Err(format!("`{s}` is not of the form lo:hi:n[:log]")),
        };
        if grid.n == 0 {
            return Err("the grid needs at least one point".into());
        }
        if !(grid.lo.is_finite() && grid.hi.is_finite()) {
            return Err("grid ends must be finite".into());
        }
        if grid.n > 1 && grid.lo >= grid.hi {
            return Err("grid needs lo < hi".into());
        }
        if grid.log && grid.lo <= 0.0 {
            return Err("a log grid needs lo > 0".into());
        }
        Ok(grid)
    }
}

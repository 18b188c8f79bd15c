//! Grid specifications: `axis=start:stop:count[:log]`, several axes separated by commas.

use std::fmt;
use std::str::FromStr;

pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl Axis {
    /// Sample values from start to stop inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / n;
                if i == self.count - 1 {
                    self.stop
                } else if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| format!("axis '{s}' is not of the form name=start:stop:count"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(format!("axis '{s}' has no name"));
        }
        let parts: Vec<&str> = range.split(':').map(str::trim).collect();
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| format!("axis '{name}': cannot read number '{p}'"))
        };
        let count = |n: &str| {
            n.parse::<usize>()
                .map_err(|_| format!("axis '{name}': cannot read count '{n}'"))
        };
        let (start, stop, count, log) = match parts.as_slice() {
            [v] => (num(v)?, num(v)?, 1, false),
            [a, b, n] => (num(a)?, num(b)?, count(n)?, false),
            [a, b, n, "log"] => (num(a)?, num(b)?, count(n)?, true),
            [_, _, _, flag] => return Err(format!("axis '{name}': unknown flag '{flag}'")),
            _ => return Err(format!("axis '{name}': expected start:stop:count[:log]")),
        };
        if count == 0 {
            return Err(format!("axis '{name}': count must be at least 1"));
        }
        if !(start.is_finite() && stop.is_finite()) {
            return Err(format!("axis '{name}': bounds must be finite"));
        }
        if stop < start || (count == 1 && stop != start) {
            return Err(format!(
                "axis '{name}': need start <= stop, and start = stop for a single point"
            ));
        }
        if log && start <= 0.0 {
            return Err(format!("axis '{name}': log spacing needs positive bounds"));
        }
        Ok(Axis {
            name: name.to_string(),
            start,
            stop,
            count,
            log,
        })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}={}:{}:{}",
            self.name, self.start, self.stop, self.count
        )?;
        if self.log {
            f.write_str(":log")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn axis(&self, name: &str) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == name)
    }

    /// Number of grid points, `None` on overflow.
    pub fn point_count(&self) -> Option<usize> {
        self.axes
            .iter()
            .try_fold(1usize, |n, a| n.checked_mul(a.count))
    }

    /// Rejects axes outside `allowed` and grids above [`MAX_GRID_POINTS`].
    pub fn check(&self, allowed: &[&str]) -> Result<(), String> {
        for a in &self.axes {
            if !allowed.contains(&a.name.as_str()) {
                return Err(format!(
                    "unknown axis '{}' (expected one of {})",
                    a.name,
                    allowed.join(", ")
                ));
            }
        }
        if self.point_count().map_or(true, |n| n > MAX_GRID_POINTS) {
            return Err(format!("grid has more than {MAX_GRID_POINTS} points"));
        }
        Ok(())
    }
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let axes = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Axis>, _>>()?;
        if axes.is_empty() {
            return Err("empty grid".into());
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(format!("axis '{}' given twice", a.name));
            }
        }
        Ok(GridSpec { axes })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.axes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_log_axes() {
        let g: GridSpec = "g=0.1:1:10,gammaB=0.01:100:5:log".parse().unwrap();
        assert_eq!(g.point_count(), Some(50));
        let v = g.axis("g").unwrap().values();
        assert_eq!(v.len(), 10);
        assert!((v[1] - 0.2).abs() < 1e-15);
        assert_eq!(v[9], 1.0);
        let w = g.axis("gammaB").unwrap().values();
        for (a, b) in w.iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_values() {
        let g: GridSpec = "TA=2".parse().unwrap();
        assert_eq!(g.axis("TA").unwrap().values(), vec![2.0]);
        assert!("TA=2:3:1".parse::<GridSpec>().is_err());
    }

    #[test]
    fn malformed_specs() {
        for s in [
            "",
            "g",
            "g=1:0:3",
            "g=0:1:0",
            "g=0:1:3:lin",
            "g=0:1:3:log",
            "g=a:1:3",
            "g=0:1:2,g=0:1:2",
            "g=0:1:2.5",
        ] {
            assert!(s.parse::<GridSpec>().is_err(), "{s}");
        }
        let big: GridSpec = "g=0.1:1:1000,gammaB=1:2:1000".parse().unwrap();
        assert!(big.check(&["g", "gammaB"]).is_err());
        assert!("x=0:1:2"
            .parse::<GridSpec>()
            .unwrap()
            .check(&["g"])
            .is_err());
    }
}

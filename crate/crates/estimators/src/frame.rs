//! A minimal column store for regression inputs: named float columns plus
//! named categorical (string-labeled) columns, all of equal length.
//! Missing float values are NaN; estimators apply listwise deletion over
//! the columns a design actually uses.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct Frame {
    n_rows: usize,
    floats: BTreeMap<String, Vec<f64>>,
    cats: BTreeMap<String, Vec<String>>,
}

impl Frame {
    pub fn new(n_rows: usize) -> Self {
        Self {
            n_rows,
            floats: BTreeMap::new(),
            cats: BTreeMap::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn check_new(&self, name: &str, len: usize) -> Result<()> {
        if self.floats.contains_key(name) || self.cats.contains_key(name) {
            return Err(Error::DuplicateColumn(name.to_owned()));
        }
        if len != self.n_rows {
            return Err(Error::ColumnLength {
                name: name.to_owned(),
                expected: self.n_rows,
                got: len,
            });
        }
        Ok(())
    }

    pub fn add_float(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        self.check_new(name, values.len())?;
        self.floats.insert(name.to_owned(), values);
        Ok(())
    }

    pub fn add_cat(&mut self, name: &str, labels: Vec<String>) -> Result<()> {
        self.check_new(name, labels.len())?;
        self.cats.insert(name.to_owned(), labels);
        Ok(())
    }

    pub fn float(&self, name: &str) -> Result<&[f64]> {
        self.floats
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    }

    pub fn cat(&self, name: &str) -> Result<&[String]> {
        self.cats
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    }

    pub fn has_float(&self, name: &str) -> bool {
        self.floats.contains_key(name)
    }

    pub fn has_cat(&self, name: &str) -> bool {
        self.cats.contains_key(name)
    }

    pub fn float_names(&self) -> impl Iterator<Item = &str> {
        self.floats.keys().map(|s| s.as_str())
    }

    /// New frame keeping only rows where `keep` is true.
    pub fn filter(&self, keep: &[bool]) -> Frame {
        assert_eq!(keep.len(), self.n_rows, "mask length mismatch");
        let pick_f = |v: &Vec<f64>| -> Vec<f64> {
            v.iter()
                .zip(keep)
                .filter_map(|(x, k)| k.then_some(*x))
                .collect()
        };
        let pick_c = |v: &Vec<String>| -> Vec<String> {
            v.iter()
                .zip(keep)
                .filter_map(|(x, k)| k.then(|| x.clone()))
                .collect()
        };
        Frame {
            n_rows: keep.iter().filter(|k| **k).count(),
            floats: self.floats.iter().map(|(n, v)| (n.clone(), pick_f(v))).collect(),
            cats: self.cats.iter().map(|(n, v)| (n.clone(), pick_c(v))).collect(),
        }
    }
}

/// Dense integer recoding of a label column: `codes[i]` indexes into
/// `labels`, which holds the distinct labels in first-appearance order.
#[derive(Clone, Debug)]
pub struct Recoded {
    pub codes: Vec<u32>,
    pub labels: Vec<String>,
}

pub fn recode(column: &[String]) -> Recoded {
    let mut index: BTreeMap<&str, u32> = BTreeMap::new();
    let mut labels = Vec::new();
    let mut codes = Vec::with_capacity(column.len());
    for label in column {
        let code = *index.entry(label.as_str()).or_insert_with(|| {
            labels.push(label.clone());
            (labels.len() - 1) as u32
        });
        codes.push(code);
    }
    Recoded { codes, labels }
}

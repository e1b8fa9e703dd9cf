use nalgebra::Vector3;

use crate::error::{Error, Result};

const ELEMENTS: [&str; 30] = [
    "H", "HE", "LI", "BE", "B", "C", "N", "O", "F", "NE", "NA", "MG", "AL", "SI", "P", "S", "CL", "AR", "K", "CA",
    "SC", "TI", "V", "CR", "MN", "FE", "CO", "NI", "CU", "ZN",
];

/// Atomic number for an element symbol from H through Zn (case-insensitive).
pub fn atomic_number(symbol: &str) -> Result<u32> {
    let s = symbol.trim().to_ascii_uppercase();
    ELEMENTS
        .iter()
        .position(|e| *e == s)
        .map(|i| i as u32 + 1)
        .ok_or_else(|| Error::UnknownElement(symbol.trim().to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomRecord {
    pub element: String,
    pub atomic_number: u32,
    pub position: Vector3<f64>,
    pub protein_id: usize,
}

impl AtomRecord {
    pub fn new(element: &str, position: Vector3<f64>, protein_id: usize) -> Result<Self> {
        let atomic_number = atomic_number(element)?;
        let mut element = element.trim().to_ascii_lowercase();
        if let Some(first) = element.get_mut(0..1) {
            first.make_ascii_uppercase();
        }
        Ok(Self { element, atomic_number, position, protein_id })
    }

    pub fn is_hydrogen(&self) -> bool {
        self.atomic_number == 1
    }
}

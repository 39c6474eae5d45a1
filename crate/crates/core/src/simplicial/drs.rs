//! De Rham–Sullivan Hochschild collections.

use crate::Error;

pub struct DrsCollection;
pub struct DrsElement;
pub struct DrsReport;

pub fn drs_validate(_c: &DrsCollection) -> Result<DrsReport, Error> {
    unimplemented!()
}

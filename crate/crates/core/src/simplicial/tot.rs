//! Totalization of a cosimplicial DGLA by Sullivan forms.

use std::sync::Arc;

use crate::dgla::DglaPresentation;
use crate::Error;

use super::CosimplicialDgla;

/// Placeholder carrier; populated by `totalize`.
pub struct TotPresentation {
    pub presentation: Arc<DglaPresentation>,
}

pub fn totalize(_c: &Arc<CosimplicialDgla>, _p_max: usize) -> Result<TotPresentation, Error> {
    unimplemented!()
}

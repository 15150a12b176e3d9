//! Rental cost accounting.

use num_traits::Zero;

use crate::model::{MachineParams, ModelError, Rental, Schedule};
use crate::rational::Q;

/// `c_type * (close_at - open_at)`. Rejects rentals closed before their setup
/// finished.
pub fn rental_cost(rental: &Rental, params: &MachineParams) -> Result<Q, ModelError> {
    if rental.close_at < rental.ready_at(params) {
        return Err(ModelError::RentalShorterThanSetup(rental.id));
    }
    Ok(params.cost(rental.machine_type) * (rental.close_at - rental.open_at))
}

/// Sum of open-time cost over all rentals. Does not validate the schedule.
pub fn total_cost(schedule: &Schedule, params: &MachineParams) -> Q {
    schedule
        .rentals
        .iter()
        .map(|r| params.cost(r.machine_type) * (r.close_at - r.open_at))
        .fold(Q::zero(), |acc, c| acc + c)
}

//! Small example logs used by the docs, tests and the CLI.

use crate::eventlog::{load_event_log, ColumnRoles, EventLog};

/// A quote-creation process with two cases and no case attributes.
pub const TABLE1_CSV: &str = "\
event_id,case_id,timestamp,event_name,status
e0001,0001,1675086864052,Review request,NEW
e0002,0002,1675147138009,Review request,NEW
e0003,0001,1675160180724,Calculate terms,WIP
e0004,0002,1675213914098,Define terms,WIP
e0005,0001,1675220315296,Prepare contract,WIP
e0006,0002,1675282027657,Prepare contract,WIP
e0007,0002,1675414104525,Send quote,SENT
";

/// One shipping case of four events, with ISO dates as timestamps.
pub const SHIPPING_CSV: &str = "\
event_id,case_id,timestamp,event_name
e1,1,2023-10-15,order_received
e2,1,2023-10-16,package_collected
e3,1,2023-10-17,package_checked
e4,1,2023-10-23,package_sent
";

pub fn table1() -> EventLog {
    load_event_log(TABLE1_CSV.as_bytes(), &ColumnRoles::default()).expect("fixture loads")
}

pub fn shipping() -> EventLog {
    load_event_log(SHIPPING_CSV.as_bytes(), &ColumnRoles::default()).expect("fixture loads")
}

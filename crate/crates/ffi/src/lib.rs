#[no_mangle]
pub extern "C" fn bersec_ffi_placeholder() -> i32 { bersec::placeholder() }

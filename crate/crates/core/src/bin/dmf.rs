fn main() {
    dmf_core::cli::main_entry();
}

# Command line and terminal rendering

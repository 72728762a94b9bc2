# Acceptance checks for the strong-separation logic tools

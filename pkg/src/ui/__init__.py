# Job files and figures

"""
TAUBERKIT - TAUBERian toolKIT.

Test-suite of tauberkit.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""

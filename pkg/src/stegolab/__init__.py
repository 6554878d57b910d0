"""stegolab: image data hiding toolkit.

Library modules: raster (image model + codecs), container (after-EOF hiding),
keys (keystream, scrambling, toy key exchange), steg (k-LSB substitution),
watermark (visible/invisible marks), attacks (robustness harness), metrics
(MSE/PSNR/BER), report (benchmark + comparison matrix), cli (command line).
"""

__version__ = "0.1.0"

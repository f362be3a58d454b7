"""Digital twin of a magnetically actuated endoscopic laser scanner.

Subpackages cover the coil/magnet physics (magnetics), the current-to-spot
dynamics (plant), command generation and operating modes (control), the
synthetic camera and spot detector (vision), trajectory metrics (metrics),
experiment orchestration (harness), and the realtime teleoperation bridge
(teleop_service).
"""

__version__ = "0.1.0"

import os
import yaml
from pathlib import Path
from typing import Dict, List, Optional
from dataclasses import dataclass
from string import Template
from dotenv import load_dotenv

from app.padic.context import Context
from app.padic.rational import parse_rational


@dataclass
class RunProfile:
    name: str
    prime: int
    order: int
    t_order: int
    nu: str = "0"
    pairs: int = 1
    variant: str = "derived"
    description: str = ""

    def context(self) -> Context:
        return Context(p=self.prime, D=self.order, Dt=self.t_order)


class RunProfiles:
    def __init__(self, config_path: str = "config/profiles.yaml"):
        load_dotenv()
        config_file = Path(config_path)
        if not config_file.exists():
            raise FileNotFoundError(f"Profiles config not found: {config_path}")

        with open(config_file, "r") as f:
            config_str = f.read()

        # Substitute environment variables; unknown ${VAR} stay as written
        config_str = Template(config_str).safe_substitute(os.environ)

        self.config = yaml.safe_load(config_str) or {}
        self.profiles = self._load_profiles()
        self.default = self.config.get("default")

    def _load_profiles(self) -> Dict[str, RunProfile]:
        profiles = {}
        for name, cfg in self.config.get("profiles", {}).items():
            profile = RunProfile(
                name=name,
                prime=int(cfg["prime"]),
                order=int(cfg["order"]),
                t_order=int(cfg["t_order"]),
                nu=str(cfg.get("nu", "0")),
                pairs=int(cfg.get("pairs", 1)),
                variant=str(cfg.get("variant", "derived")),
                description=cfg.get("description", ""),
            )
            parse_rational(profile.nu)
            profiles[name] = profile
        return profiles

    def get_profile(self, name: Optional[str] = None) -> RunProfile:
        name = name or self.default
        if name not in self.profiles:
            raise ValueError(f"Profile not found: {name}")
        return self.profiles[name]

    def names(self) -> List[str]:
        return sorted(self.profiles)

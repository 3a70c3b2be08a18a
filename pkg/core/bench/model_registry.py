# core/bench/model_registry.py
import inspect
from typing import Callable, Dict, Generic, List, Optional, Type, TypeVar

from config.logging_config import get_module_logger
from utils.error_handling import ConditionalBOError

# Create a logger for this module
logger = get_module_logger("model_registry")

T = TypeVar("T")


class UnknownComponentError(ConditionalBOError, KeyError):
    """Exception raised when a selector names no registered component."""
    pass


class ComponentRegistry(Generic[T]):
    """Registry of bench components (surrogate models, BO arms) of one kind."""

    def __init__(self, component_type: str):
        self.component_type = component_type
        self.components: Dict[str, Type[T]] = {}
        logger.debug(f"Initialized {component_type} registry")

    def register(self, name: str, component_class: Type[T]) -> Type[T]:
        """Register a component class.

        Args:
            name: Selector used in experiment configs
            component_class: Component class

        Returns:
            The registered component class (for decorator usage)
        """
        if name in self.components:
            logger.warning(f"{self.component_type} '{name}' already registered, overwriting")
        self.components[name] = component_class
        logger.debug(f"Registered {self.component_type}: {name}")
        return component_class

    def register_decorator(self, name: str) -> Callable[[Type[T]], Type[T]]:
        def decorator(component_class: Type[T]) -> Type[T]:
            return self.register(name, component_class)
        return decorator

    def get(self, name: str) -> Optional[Type[T]]:
        component = self.components.get(name)
        if component is None:
            logger.warning(f"{self.component_type} '{name}' not found")
        return component

    def list(self) -> List[str]:
        return list(self.components.keys())

    def create(self, name: str, **kwargs) -> T:
        """Instantiate a registered component, passing only the kwargs its constructor accepts.

        Raises:
            UnknownComponentError: If nothing is registered under `name`
        """
        component_class = self.get(name)
        if component_class is None:
            raise UnknownComponentError(
                f"Unknown {self.component_type} '{name}'; registered: {', '.join(sorted(self.list()))}"
            )
        params = inspect.signature(component_class.__init__).parameters
        valid_kwargs = {k: v for k, v in kwargs.items() if k in params}
        return component_class(**valid_kwargs)


class BenchRegistry:
    """Global registry of component registries, keyed by component type."""

    _registries: Dict[str, ComponentRegistry] = {}

    @classmethod
    def registry(cls, component_type: str) -> ComponentRegistry:
        """Get the registry for a component type, creating it on first use."""
        if component_type not in cls._registries:
            cls._registries[component_type] = ComponentRegistry(component_type)
        return cls._registries[component_type]

    @classmethod
    def list_components(cls, component_type: str) -> List[str]:
        registry = cls._registries.get(component_type)
        return registry.list() if registry is not None else []


def surrogate_model(name: str):
    """Decorator to register a regression surrogate model."""
    return BenchRegistry.registry("surrogate_model").register_decorator(name)


def bo_arm(name: str):
    """Decorator to register an optimization arm."""
    return BenchRegistry.registry("bo_arm").register_decorator(name)

from app.config import settings
